#include "permsym/orbit_core.hpp"

#include "permsym/error.hpp"

#include <algorithm>
#include <numeric>

namespace permsym {

SystemSpec::SystemSpec(std::vector<int> dims, int n) : local_dims(std::move(dims)), copies(n)
{
    detail::require(copies >= 1, "copies must be >= 1");
    detail::require(!local_dims.empty(), "at least one local dimension required");
    for (int d : local_dims) detail::require(d >= 1, "local dimensions must be >= 1");
}

int SystemSpec::dim() const
{
    return std::accumulate(local_dims.begin(), local_dims.end(), 1, std::multiplies<>());
}

SystemSpec factor_spec(const SystemSpec& spec, Side side)
{
    detail::require(spec.bipartite(), "bipartite spec required");
    return SystemSpec({spec.local_dims[side == Side::A ? 0 : 1]}, spec.copies);
}

// ---------------------------------------------------------------- CountMatrix

CountMatrix::CountMatrix(int d, std::vector<int> entries) : d_(d), e_(std::move(entries))
{
    detail::require(d >= 1 && e_.size() == static_cast<std::size_t>(d * d), "count matrix must be d×d");
    for (int v : e_) detail::require(v >= 0, "count matrix entries must be non-negative");
}

int CountMatrix::n() const { return std::accumulate(e_.begin(), e_.end(), 0); }

bool CountMatrix::is_diagonal() const
{
    for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b)
            if (a != b && (*this)(a, b) != 0) return false;
    return true;
}

CountMatrix CountMatrix::transposed() const
{
    CountMatrix t = zeros(d_);
    for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b) t.at(b, a) = (*this)(a, b);
    return t;
}

std::vector<int> CountMatrix::row_sums() const
{
    std::vector<int> r(static_cast<std::size_t>(d_), 0);
    for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b) r[static_cast<std::size_t>(a)] += (*this)(a, b);
    return r;
}

std::vector<int> CountMatrix::col_sums() const
{
    std::vector<int> c(static_cast<std::size_t>(d_), 0);
    for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b) c[static_cast<std::size_t>(b)] += (*this)(a, b);
    return c;
}

// ---------------------------------------------------------------- OrbitBasis

OrbitBasis::OrbitBasis(SystemSpec spec) : spec_(std::move(spec)), d_(spec_.dim())
{
    size_ = weak_composition_count(spec_.copies, d_ * d_);
}

std::uint64_t OrbitBasis::index(const CountMatrix& e) const
{
    detail::require(e.d() == d_ && e.n() == n(), "count matrix does not belong to this basis");
    return composition_rank(e.entries());
}

CountMatrix OrbitBasis::orbit(std::uint64_t idx) const
{
    if (materialized()) {
        detail::require(idx < orbits_.size(), "orbit index out of range");
        return orbits_[idx];
    }
    detail::require(idx < size_, "orbit index out of range");
    return CountMatrix(d_, composition_unrank(idx, n(), d_ * d_));
}

OrbitBasis enumerate_orbits(const SystemSpec& spec, std::uint64_t budget)
{
    OrbitBasis basis(spec);
    if (basis.size() > budget)
        throw CapacityError("orbit enumeration of " + std::to_string(basis.size()) +
                            " orbits exceeds budget " + std::to_string(budget));
    const int m = basis.d() * basis.d();
    std::vector<int> e(static_cast<std::size_t>(m), 0);
    e.back() = spec.copies;
    basis.orbits_.reserve(basis.size());
    do {
        basis.orbits_.emplace_back(basis.d(), e);
    } while (next_composition(e));
    return basis;
}

std::vector<CountMatrix> enumerate_supported(int d, int n, const std::vector<bool>& support,
                                             std::uint64_t budget)
{
    detail::require(support.size() == static_cast<std::size_t>(d * d), "support mask must be d×d");
    std::vector<int> pos;
    for (int k = 0; k < d * d; ++k)
        if (support[static_cast<std::size_t>(k)]) pos.push_back(k);
    std::vector<CountMatrix> out;
    if (pos.empty()) return out;
    const auto count = weak_composition_count(n, static_cast<int>(pos.size()));
    if (count > budget)
        throw CapacityError("supported orbit enumeration of " + std::to_string(count) +
                            " orbits exceeds budget " + std::to_string(budget));
    out.reserve(count);
    std::vector<int> c(pos.size(), 0);
    c.back() = n;
    do {
        std::vector<int> e(static_cast<std::size_t>(d * d), 0);
        for (std::size_t k = 0; k < pos.size(); ++k) e[static_cast<std::size_t>(pos[k])] = c[k];
        out.emplace_back(d, std::move(e));
    } while (next_composition(c));
    // Support positions are increasing, so composition order on the support
    // coincides with canonical order on the full entry vector.
    return out;
}

// ---------------------------------------------------------------- single orbits

cplx OrbitCoefficients::get(std::uint64_t idx) const
{
    auto it = values.find(idx);
    return it == values.end() ? cplx{} : it->second;
}

std::pair<std::vector<int>, std::vector<int>> representative(const CountMatrix& e)
{
    std::vector<int> i, j;
    for (int a = 0; a < e.d(); ++a)
        for (int b = 0; b < e.d(); ++b)
            for (int k = 0; k < e(a, b); ++k) {
                i.push_back(a);
                j.push_back(b);
            }
    return {i, j};
}

CountMatrix count_of_pair(std::span<const int> i, std::span<const int> j, int d)
{
    detail::require(i.size() == j.size(), "multi-indices must have equal length");
    CountMatrix e = CountMatrix::zeros(d);
    for (std::size_t k = 0; k < i.size(); ++k) {
        detail::require(i[k] >= 0 && i[k] < d && j[k] >= 0 && j[k] < d, "symbol out of range");
        e.at(i[k], j[k]) += 1;
    }
    return e;
}

BigInt orbit_size(const CountMatrix& e) { return multinomial(e.entries()); }

BigInt trace_orbit(const CountMatrix& e)
{
    if (!e.is_diagonal()) return 0;
    std::vector<int> diag;
    for (int a = 0; a < e.d(); ++a) diag.push_back(e(a, a));
    return multinomial(diag);
}

OrbitCoefficients tensor_coefficients(const Eigen::MatrixXcd& x, int n, BasisPtr basis)
{
    const int d = basis->d();
    detail::require(x.rows() == d && x.cols() == d, "matrix dimension does not match basis");
    detail::require(n == basis->n(), "copy number does not match basis");
    std::vector<bool> support(static_cast<std::size_t>(d * d));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) support[static_cast<std::size_t>(a * d + b)] = x(a, b) != cplx{};
    OrbitCoefficients out(basis);
    out.support = support;
    for (const auto& e : enumerate_supported(d, n, support)) {
        cplx c = 1.0;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int k = 0; k < e(a, b); ++k) c *= x(a, b);
        out.values.emplace(basis->index(e), c);
    }
    return out;
}

OrbitCoefficients identity_coeffs(BasisPtr basis)
{
    const int d = basis->d();
    std::vector<bool> diag(static_cast<std::size_t>(d * d), false);
    for (int a = 0; a < d; ++a) diag[static_cast<std::size_t>(a * d + a)] = true;
    OrbitCoefficients out(basis);
    out.support = diag;
    for (const auto& e : enumerate_supported(d, basis->n(), diag)) out.values.emplace(basis->index(e), 1.0);
    return out;
}

OrbitCoefficients transpose_coeffs(const OrbitCoefficients& x)
{
    OrbitCoefficients out(x.basis);
    for (const auto& [idx, v] : x.values) out.values.emplace(x.basis->index(x.basis->orbit(idx).transposed()), v);
    if (x.support) {
        const int d = x.basis->d();
        std::vector<bool> s(x.support->size());
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) s[static_cast<std::size_t>(b * d + a)] = (*x.support)[static_cast<std::size_t>(a * d + b)];
        out.support = s;
    }
    return out;
}

// ---------------------------------------------------------------- bipartite

CountMatrix partial_transpose(const CountMatrix& e, int d_a, int d_b, Side side)
{
    detail::require(e.d() == d_a * d_b, "count matrix does not match bipartite dims");
    CountMatrix out = CountMatrix::zeros(e.d());
    for (int aa = 0; aa < d_a; ++aa)
        for (int ab = 0; ab < d_b; ++ab)
            for (int ba = 0; ba < d_a; ++ba)
                for (int bb = 0; bb < d_b; ++bb) {
                    const int src = side == Side::B ? e(aa * d_b + bb, ba * d_b + ab)
                                                    : e(ba * d_b + ab, aa * d_b + bb);
                    out.at(aa * d_b + ab, ba * d_b + bb) = src;
                }
    return out;
}

OrbitCoefficients partial_transpose_coeffs(const OrbitCoefficients& x, Side side)
{
    const auto& spec = x.basis->spec();
    detail::require(spec.bipartite(), "partial transpose needs a bipartite spec");
    const int d_a = spec.local_dims[0], d_b = spec.local_dims[1];
    OrbitCoefficients out(x.basis);
    for (const auto& [idx, v] : x.values)
        out.values.emplace(x.basis->index(partial_transpose(x.basis->orbit(idx), d_a, d_b, side)), v);
    if (x.support) {
        const int d = d_a * d_b;
        CountMatrix mask = CountMatrix::zeros(d);
        for (int k = 0; k < d * d; ++k)
            if ((*x.support)[static_cast<std::size_t>(k)]) mask.at(k / d, k % d) = 1;
        const auto pt = partial_transpose(mask, d_a, d_b, side);
        std::vector<bool> s(x.support->size());
        for (int k = 0; k < d * d; ++k) s[static_cast<std::size_t>(k)] = pt(k / d, k % d) != 0;
        out.support = s;
    }
    return out;
}

CountMatrix marginal(const CountMatrix& e, int d_a, int d_b, Side keep)
{
    const int dk = keep == Side::A ? d_a : d_b;
    CountMatrix out = CountMatrix::zeros(dk);
    for (int aa = 0; aa < d_a; ++aa)
        for (int ab = 0; ab < d_b; ++ab)
            for (int ba = 0; ba < d_a; ++ba)
                for (int bb = 0; bb < d_b; ++bb) {
                    const int v = e(aa * d_b + ab, ba * d_b + bb);
                    if (keep == Side::A)
                        out.at(aa, ba) += v;
                    else
                        out.at(ab, bb) += v;
                }
    return out;
}

BigInt kappa(const CountMatrix& e, int d_a, int d_b, Side keep)
{
    BigInt k = 1;
    const int dk = keep == Side::A ? d_a : d_b;
    const int dt = keep == Side::A ? d_b : d_a;
    std::vector<int> parts(static_cast<std::size_t>(dt * dt));
    for (int x = 0; x < dk; ++x)
        for (int y = 0; y < dk; ++y) {
            for (int u = 0; u < dt; ++u)
                for (int v = 0; v < dt; ++v) {
                    const int row = keep == Side::A ? x * d_b + u : u * d_b + x;
                    const int col = keep == Side::A ? y * d_b + v : v * d_b + y;
                    parts[static_cast<std::size_t>(u * dt + v)] = e(row, col);
                }
            k *= multinomial(parts);
        }
    return k;
}

const MarginalEntry* MarginalData::find(std::uint64_t s) const
{
    auto it = by_joint.find(s);
    return it == by_joint.end() ? nullptr : &entries[it->second];
}

MarginalData marginal_data(const SystemSpec& spec, const std::vector<CountMatrix>& joint)
{
    detail::require(spec.bipartite(), "marginal data needs a bipartite spec");
    const int d_a = spec.local_dims[0], d_b = spec.local_dims[1];
    MarginalData md;
    md.spec = spec;
    md.joint = std::make_shared<OrbitBasis>(spec);
    md.a = std::make_shared<OrbitBasis>(factor_spec(spec, Side::A));
    md.b = std::make_shared<OrbitBasis>(factor_spec(spec, Side::B));
    md.entries.reserve(joint.size());
    for (const auto& e : joint) {
        MarginalEntry m;
        m.s = md.joint->index(e);
        const auto ra = marginal(e, d_a, d_b, Side::A);
        const auto tb = marginal(e, d_a, d_b, Side::B);
        m.r = md.a->index(ra);
        m.t = md.b->index(tb);
        m.kappa_a = kappa(e, d_a, d_b, Side::A);
        m.kappa_b = kappa(e, d_a, d_b, Side::B);
        m.kappa_a_f = to_double(m.kappa_a);
        m.kappa_b_f = to_double(m.kappa_b);
        m.tau_b = tb.is_diagonal();
        m.tau_a = ra.is_diagonal();
        md.entries.push_back(std::move(m));
    }
    std::sort(md.entries.begin(), md.entries.end(), [](const auto& x, const auto& y) { return x.s < y.s; });
    for (std::size_t k = 0; k < md.entries.size(); ++k) md.by_joint.emplace(md.entries[k].s, k);
    return md;
}

MarginalData marginal_data(const SystemSpec& spec, std::uint64_t budget)
{
    return marginal_data(spec, enumerate_orbits(spec, budget).orbits());
}

MarginalData marginal_data_for(const OrbitCoefficients& x)
{
    std::vector<CountMatrix> joint;
    joint.reserve(x.values.size());
    for (const auto& kv : x.values) joint.push_back(x.basis->orbit(kv.first));
    return marginal_data(x.basis->spec(), joint);
}

OrbitCoefficients partial_trace_coeffs(const OrbitCoefficients& x, const MarginalData& md, Side traced)
{
    detail::require(x.basis->spec() == md.spec, "marginal data built for a different spec");
    OrbitCoefficients out(traced == Side::B ? md.a : md.b);
    for (const auto& [s, v] : x.values) {
        const auto* m = md.find(s);
        if (m == nullptr) throw ArgumentError("marginal data lacks an orbit present in the input");
        if (traced == Side::B) {
            if (m->tau_b) out.add(m->r, v * m->kappa_a_f);
        } else {
            if (m->tau_a) out.add(m->t, v * m->kappa_b_f);
        }
    }
    return out;
}

cplx hs_inner(const OrbitCoefficients& x, const OrbitCoefficients& y)
{
    detail::require(*x.basis == *y.basis, "hs_inner: basis mismatch");
    cplx acc{};
    for (const auto& [idx, v] : x.values) {
        auto it = y.values.find(idx);
        if (it == y.values.end()) continue;
        acc += std::conj(v) * it->second * to_double(orbit_size(x.basis->orbit(idx)));
    }
    return acc;
}

cplx trace_coeffs(const OrbitCoefficients& x)
{
    cplx acc{};
    for (const auto& [idx, v] : x.values) {
        const auto e = x.basis->orbit(idx);
        if (e.is_diagonal()) acc += v * to_double(trace_orbit(e));
    }
    return acc;
}

}  // namespace permsym
