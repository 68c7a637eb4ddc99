#include "permsym/schur_weyl.hpp"

#include "permsym/error.hpp"
#include "permsym/link_product.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace permsym {

// ---------------------------------------------------------------- tableaux

int Partition::n() const { return std::accumulate(parts.begin(), parts.end(), 0); }

std::vector<int> Partition::conjugate() const
{
    std::vector<int> c(static_cast<std::size_t>(height() ? parts[0] : 0), 0);
    for (int p : parts)
        for (int j = 0; j < p; ++j) ++c[static_cast<std::size_t>(j)];
    return c;
}

Partition Tableau::shape() const
{
    Partition p;
    for (const auto& r : rows) p.parts.push_back(static_cast<int>(r.size()));
    return p;
}

bool Tableau::semistandard() const
{
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            if (j > 0 && rows[i][j] < rows[i][j - 1]) return false;
            if (i > 0 && (j >= rows[i - 1].size() || rows[i][j] <= rows[i - 1][j])) return false;
        }
    return true;
}

std::vector<int> Tableau::weight(int d) const
{
    std::vector<int> w(static_cast<std::size_t>(d), 0);
    for (const auto& r : rows)
        for (int v : r) ++w[static_cast<std::size_t>(v)];
    return w;
}

CountMatrix Tableau::count_matrix(int d) const
{
    CountMatrix e = CountMatrix::zeros(d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int v : rows[i]) e.at(v, static_cast<int>(i)) += 1;
    return e;
}

std::vector<int> Tableau::reading_word() const
{
    std::vector<int> w;
    for (const auto& r : rows) w.insert(w.end(), r.begin(), r.end());
    return w;
}

namespace {

void partitions_rec(int remaining, int max_part, int slots, std::vector<int>& cur, std::vector<Partition>& out)
{
    if (remaining == 0) {
        out.push_back(Partition{cur});
        return;
    }
    if (slots == 0) return;
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        cur.push_back(p);
        partitions_rec(remaining - p, p, slots - 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Partition> partitions(int d, int n)
{
    detail::require(d >= 1 && n >= 1, "partitions need d, n >= 1");
    std::vector<Partition> out;
    std::vector<int> cur;
    partitions_rec(n, n, d, cur, out);
    return out;
}

BigInt syt_count(const Partition& lambda)
{
    const auto conj = lambda.conjugate();
    BigInt hooks = 1;
    for (int i = 0; i < lambda.height(); ++i)
        for (int j = 0; j < lambda[i]; ++j) hooks *= (lambda[i] - j - 1) + (conj[static_cast<std::size_t>(j)] - i - 1) + 1;
    return factorial(lambda.n()) / hooks;
}

BigInt ssyt_count(const Partition& lambda, int d)
{
    if (lambda.height() > d) return 0;
    const auto conj = lambda.conjugate();
    BigInt num = 1, den = 1;
    for (int i = 0; i < lambda.height(); ++i)
        for (int j = 0; j < lambda[i]; ++j) {
            num *= d + j - i;
            den *= (lambda[i] - j - 1) + (conj[static_cast<std::size_t>(j)] - i - 1) + 1;
        }
    return num / den;
}

namespace {

void ssyt_rec(const Partition& lambda, int d, std::size_t box, Tableau& t, std::vector<Tableau>& out)
{
    std::size_t acc = 0;
    int row = -1, col = -1;
    for (int i = 0; i < lambda.height(); ++i) {
        if (box < acc + static_cast<std::size_t>(lambda[i])) {
            row = i;
            col = static_cast<int>(box - acc);
            break;
        }
        acc += static_cast<std::size_t>(lambda[i]);
    }
    if (row < 0) {
        out.push_back(t);
        return;
    }
    int lo = 0;
    if (col > 0) lo = std::max(lo, t.rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(col - 1)]);
    if (row > 0) lo = std::max(lo, t.rows[static_cast<std::size_t>(row - 1)][static_cast<std::size_t>(col)] + 1);
    // Column below still needs room for strictly larger symbols.
    const int below = lambda.conjugate()[static_cast<std::size_t>(col)] - row - 1;
    for (int v = lo; v < d - below; ++v) {
        t.rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] = v;
        ssyt_rec(lambda, d, box + 1, t, out);
    }
}

}  // namespace

std::vector<Tableau> ssyt_enumerate(const Partition& lambda, int d)
{
    std::vector<Tableau> out;
    if (lambda.height() > d) return out;
    Tableau t;
    for (int p : lambda.parts) t.rows.emplace_back(static_cast<std::size_t>(p), 0);
    ssyt_rec(lambda, d, 0, t, out);
    return out;
}

Tableau constant_tableau(const Partition& lambda)
{
    Tableau t;
    for (int i = 0; i < lambda.height(); ++i) t.rows.emplace_back(static_cast<std::size_t>(lambda[i]), i);
    return t;
}

// ---------------------------------------------------------------- polynomials

Polynomial Polynomial::constant(int d, const BigInt& c)
{
    Polynomial p(d);
    p.add_term(std::vector<int>(static_cast<std::size_t>(d * d), 0), c);
    return p;
}

Polynomial Polynomial::variable(int d, int a, int b)
{
    std::vector<int> e(static_cast<std::size_t>(d * d), 0);
    e[static_cast<std::size_t>(a * d + b)] = 1;
    Polynomial p(d);
    p.add_term(e, 1);
    return p;
}

BigInt Polynomial::coeff(const CountMatrix& e) const
{
    auto it = terms_.find(e.entries());
    return it == terms_.end() ? BigInt(0) : it->second;
}

void Polynomial::add_term(const std::vector<int>& exps, const BigInt& c)
{
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(exps, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::operator+(const Polynomial& o) const
{
    Polynomial r = *this;
    if (r.d_ == 0) r.d_ = o.d_;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * BigInt(-1); }

Polynomial Polynomial::operator*(const Polynomial& o) const
{
    Polynomial r(std::max(d_, o.d_));
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) {
            std::vector<int> e(e1.size());
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = e1[k] + e2[k];
            r.add_term(e, c1 * c2);
        }
    return r;
}

Polynomial Polynomial::operator*(const BigInt& c) const
{
    Polynomial r(d_);
    if (c == 0) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

Polynomial Polynomial::pow(int k) const
{
    Polynomial r = constant(d_, 1);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

Polynomial Polynomial::divide_exact(const BigInt& c) const
{
    Polynomial r(d_);
    for (const auto& [e, v] : terms_) {
        if (v % c != 0) throw NumericalError("polynomial coefficient not divisible by normalization");
        r.terms_.emplace(e, v / c);
    }
    return r;
}

Polynomial Polynomial::derivative(int a, int b) const
{
    Polynomial r(d_);
    const auto idx = static_cast<std::size_t>(a * d_ + b);
    for (const auto& [e, v] : terms_) {
        if (e[idx] == 0) continue;
        auto f = e;
        f[idx] -= 1;
        r.add_term(f, v * e[idx]);
    }
    return r;
}

BigInt Polynomial::at_identity() const
{
    BigInt s = 0;
    for (const auto& [e, v] : terms_) {
        bool diag = true;
        for (int a = 0; a < d_ && diag; ++a)
            for (int b = 0; b < d_; ++b)
                if (a != b && e[static_cast<std::size_t>(a * d_ + b)] != 0) {
                    diag = false;
                    break;
                }
        if (diag) s += v;
    }
    return s;
}

namespace {

/// Multiplies every term by x_{a,b} after differentiating in x_{c,d}; the
/// shared kernel of both differential operators.
void shift_terms(const Polynomial::Terms& in, int d, int from, int to, Polynomial& out)
{
    for (const auto& [e, v] : in) {
        const int k = e[static_cast<std::size_t>(from)];
        if (k == 0) continue;
        auto f = e;
        f[static_cast<std::size_t>(from)] -= 1;
        f[static_cast<std::size_t>(to)] += 1;
        out.add_term(f, v * k);
    }
    (void)d;
}

}  // namespace

Polynomial diff_op(const Polynomial& p, int a, int b)
{
    const int d = p.d();
    Polynomial out(d);
    for (int c = 0; c < d; ++c) shift_terms(p.terms(), d, c * d + b, c * d + a, out);
    return out;
}

Polynomial diff_op_star(const Polynomial& p, int a, int b)
{
    const int d = p.d();
    Polynomial out(d);
    for (int c = 0; c < d; ++c) shift_terms(p.terms(), d, b * d + c, a * d + c, out);
    return out;
}

namespace {

int perm_sign(const std::vector<int>& p)
{
    int s = 1;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) s = -s;
    return s;
}

/// det (x_{rows_i, cols_j}) by the Leibniz expansion.
Polynomial det_poly(int d, const std::vector<int>& rows, const std::vector<int>& cols)
{
    std::vector<int> p(rows.size());
    std::iota(p.begin(), p.end(), 0);
    Polynomial out(d);
    do {
        std::vector<int> e(static_cast<std::size_t>(d * d), 0);
        for (std::size_t i = 0; i < p.size(); ++i)
            e[static_cast<std::size_t>(rows[i] * d + cols[static_cast<std::size_t>(p[i])])] += 1;
        out.add_term(e, perm_sign(p));
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

void require_pair(const Tableau& tau, const Tableau& gamma, int d)
{
    detail::require(tau.shape() == gamma.shape(), "tableaux must have the same shape");
    detail::require(tau.semistandard() && gamma.semistandard(), "tableaux must be semistandard");
    for (const auto* t : {&tau, &gamma})
        for (const auto& r : t->rows)
            for (int v : r) detail::require(v >= 0 && v < d, "tableau entry outside [d]");
}

}  // namespace

Polynomial p_lambda(const Partition& lambda, int d)
{
    detail::require(lambda.height() <= d, "partition has more than d parts");
    Polynomial p = Polynomial::constant(d, 1);
    for (int k = 1; k <= lambda.height(); ++k) {
        const int e = lambda[k - 1] - lambda[k];
        if (e == 0) continue;
        std::vector<int> idx(static_cast<std::size_t>(k));
        std::iota(idx.begin(), idx.end(), 0);
        const Polynomial q = det_poly(d, idx, idx) * factorial(k);
        p = p * q.pow(e);
    }
    return p;
}

Polynomial encoding_poly_m2(const Tableau& tau, const Tableau& gamma, int d)
{
    require_pair(tau, gamma, d);
    const auto lambda = tau.shape();
    const auto et = tau.count_matrix(d), eg = gamma.count_matrix(d);
    Polynomial p = p_lambda(lambda, d);
    BigInt norm = 1;
    // Rightmost factor of Π_{b} Π_{a>b} acts first.
    for (int b = d - 2; b >= 0; --b)
        for (int a = d - 1; a > b; --a) {
            for (int k = 0; k < et(a, b); ++k) p = diff_op_star(p, a, b);
            for (int k = 0; k < eg(a, b); ++k) p = diff_op(p, a, b);
            norm *= factorial(et(a, b)) * factorial(eg(a, b));
        }
    return p.divide_exact(norm);
}

namespace {

struct M1Context {
    int d;
    Partition lambda;
    std::vector<std::vector<int>> rem_tau, rem_gamma;  // [row][symbol]
    std::vector<int> columns;                           // columns of each height (index t-1)
    std::map<std::pair<std::vector<int>, std::vector<int>>, Polynomial> det_cache;
    Polynomial result;
    BigInt c_lambda;
};

std::vector<std::vector<int>> injective_tuples(int d, int t)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(t), 0);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == t) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v < d; ++v) {
            if (std::find(cur.begin(), cur.begin() + pos, v) != cur.begin() + pos) continue;
            cur[static_cast<std::size_t>(pos)] = v;
            rec(pos + 1);
        }
    };
    rec(0);
    return out;
}

void m1_height(M1Context& ctx, int t, Polynomial acc, BigInt weight);

void m1_types(M1Context& ctx, int t, const std::vector<std::pair<std::vector<int>, std::vector<int>>>& types,
              std::size_t ti, int left, Polynomial acc, BigInt weight)
{
    if (left == 0) {
        m1_height(ctx, t - 1, std::move(acc), std::move(weight));
        return;
    }
    if (ti == types.size()) return;
    const auto& [v, w] = types[ti];
    int cap = left;
    for (int i = 0; i < t; ++i) {
        cap = std::min(cap, ctx.rem_tau[static_cast<std::size_t>(i)][static_cast<std::size_t>(v[static_cast<std::size_t>(i)])]);
        cap = std::min(cap, ctx.rem_gamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(w[static_cast<std::size_t>(i)])]);
    }
    auto it = ctx.det_cache.find(types[ti]);
    if (it == ctx.det_cache.end()) it = ctx.det_cache.emplace(types[ti], det_poly(ctx.d, v, w)).first;
    const Polynomial& det = it->second;
    Polynomial cur = acc;
    for (int k = 0; k <= cap; ++k) {
        if (k > 0) {
            cur = cur * det;
            for (int i = 0; i < t; ++i) {
                --ctx.rem_tau[static_cast<std::size_t>(i)][static_cast<std::size_t>(v[static_cast<std::size_t>(i)])];
                --ctx.rem_gamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(w[static_cast<std::size_t>(i)])];
            }
        }
        if (!cur.is_zero()) m1_types(ctx, t, types, ti + 1, left - k, cur, weight / factorial(k));
    }
    for (int i = 0; i < t; ++i) {
        ctx.rem_tau[static_cast<std::size_t>(i)][static_cast<std::size_t>(v[static_cast<std::size_t>(i)])] += cap;
        ctx.rem_gamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(w[static_cast<std::size_t>(i)])] += cap;
    }
}

void m1_height(M1Context& ctx, int t, Polynomial acc, BigInt weight)
{
    if (t == 0) {
        ctx.result = ctx.result + acc * weight;
        return;
    }
    const int cols = ctx.columns[static_cast<std::size_t>(t - 1)];
    if (cols == 0) {
        m1_height(ctx, t - 1, std::move(acc), std::move(weight));
        return;
    }
    std::vector<std::pair<std::vector<int>, std::vector<int>>> types;
    const auto tuples = injective_tuples(ctx.d, t);
    for (const auto& v : tuples)
        for (const auto& w : tuples) types.emplace_back(v, w);
    m1_types(ctx, t, types, 0, cols, std::move(acc), weight * factorial(cols));
}

}  // namespace

Polynomial encoding_poly_m1(const Tableau& tau, const Tableau& gamma, int d)
{
    require_pair(tau, gamma, d);
    M1Context ctx;
    ctx.d = d;
    ctx.lambda = tau.shape();
    const int h = ctx.lambda.height();
    ctx.rem_tau.assign(static_cast<std::size_t>(h), std::vector<int>(static_cast<std::size_t>(d), 0));
    ctx.rem_gamma = ctx.rem_tau;
    for (int i = 0; i < h; ++i) {
        for (int v : tau.rows[static_cast<std::size_t>(i)]) ++ctx.rem_tau[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)];
        for (int v : gamma.rows[static_cast<std::size_t>(i)]) ++ctx.rem_gamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)];
    }
    for (int t = 1; t <= h; ++t) ctx.columns.push_back(ctx.lambda[t - 1] - ctx.lambda[t]);
    ctx.result = Polynomial(d);
    BigInt c_lambda = 1;
    for (int c : ctx.lambda.conjugate()) c_lambda *= factorial(c);
    // Weights are exact: each height contributes a multinomial coefficient.
    m1_height(ctx, h, Polynomial::constant(d, 1), c_lambda);
    return ctx.result;
}

std::vector<std::pair<CountMatrix, BigInt>> transition_action(const CountMatrix& e, int a, int b, TransitionSide side)
{
    detail::require(a != b, "transition needs a != b");
    const int d = e.d();
    std::vector<std::pair<CountMatrix, BigInt>> out;
    for (int c = 0; c < d; ++c) {
        CountMatrix f = e;
        if (side == TransitionSide::Right) {
            if (e(c, a) == 0) continue;
            f.at(c, a) -= 1;
            f.at(c, b) += 1;
            out.emplace_back(f, BigInt(e(c, b) + 1));
        } else {
            if (e(b, c) == 0) continue;
            f.at(b, c) -= 1;
            f.at(a, c) += 1;
            out.emplace_back(f, BigInt(e(a, c) + 1));
        }
    }
    return out;
}

// ---------------------------------------------------------------- change of basis

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gram(const Partition& lambda, int d,
                                                 const std::vector<std::vector<Polynomial>>& polys)
{
    const auto tabs = ssyt_enumerate(lambda, d);
    const auto m = static_cast<long>(tabs.size());
    detail::require(static_cast<long>(polys.size()) == m, "polynomial table does not match the block");
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j) g(i, j) = to_double(polys[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].at_identity());

    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m, m);
    std::map<std::vector<int>, std::vector<long>> by_weight;
    for (long i = 0; i < m; ++i) by_weight[tabs[static_cast<std::size_t>(i)].weight(d)].push_back(i);
    for (const auto& [w, idx] : by_weight) {
        const auto k = static_cast<long>(idx.size());
        Eigen::MatrixXd sub(k, k);
        for (long i = 0; i < k; ++i)
            for (long j = 0; j < k; ++j) sub(i, j) = g(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
        const auto& ev = es.eigenvalues();
        const double top = ev.cwiseAbs().maxCoeff();
        if (ev.minCoeff() <= 1e-12 * top)
            throw NumericalError("Gram matrix block is numerically singular");
        const Eigen::MatrixXd rs = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
        for (long i = 0; i < k; ++i)
            for (long j = 0; j < k; ++j) r(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]) = rs(i, j);
    }
    return {g, r};
}

ChangeOfBasis build_change_of_basis(int d, int n, bool use_method1, std::uint64_t budget)
{
    return build_change_of_basis(SystemSpec({d}, n), use_method1, budget);
}

ChangeOfBasis build_change_of_basis(const SystemSpec& spec, bool use_method1, std::uint64_t budget)
{
    const int d = spec.dim(), n = spec.copies;
    ChangeOfBasis cob;
    auto basis = std::make_shared<OrbitBasis>(enumerate_orbits(spec, budget));
    cob.basis = basis;
    const auto size = basis->size();
    cob.raw.resize(size);
    cob.ortho.resize(size);
    cob.orbit_norm2.resize(size);
    for (std::uint64_t r = 0; r < size; ++r) cob.orbit_norm2[r] = to_double(orbit_size(basis->orbits()[r]));

    for (const auto& lambda : partitions(d, n)) {
        BlockInfo info;
        info.lambda = lambda;
        info.tableaux = ssyt_enumerate(lambda, d);
        info.m = static_cast<int>(info.tableaux.size());
        info.f = syt_count(lambda);
        info.mult = to_double(info.f);
        info.label = "(";
        for (int k = 0; k < lambda.height(); ++k) info.label += (k ? "," : "") + std::to_string(lambda[k]);
        info.label += ")";
        const auto m = static_cast<std::size_t>(info.m);
        std::vector<std::vector<Polynomial>> polys(m, std::vector<Polynomial>(m));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                const auto& t = info.tableaux[i];
                const auto& g = info.tableaux[j];
                // Entries vanish unless both weights match the orbit marginals,
                // so pairs of unequal total weight never appear.
                polys[i][j] = use_method1 ? encoding_poly_m1(t, g, d) : encoding_poly_m2(t, g, d);
            }
        std::tie(info.gram, info.factor) = gram(lambda, d, polys);
        const auto bidx = static_cast<std::uint32_t>(cob.blocks.size());

        // Raw entries grouped by orbit.
        std::map<std::uint64_t, std::vector<OrbitBlockEntry>> per_orbit;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (const auto& [e, c] : polys[i][j].terms()) {
                    const auto r = basis->index(CountMatrix(d, e));
                    per_orbit[r].push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), to_double(c)});
                }
        for (auto& [r, entries] : per_orbit) {
            std::vector<long> rows, cols;
            for (const auto& en : entries) {
                rows.push_back(en.row);
                cols.push_back(en.col);
                cob.raw[r].emplace_back(bidx, en);
            }
            // The orbit occupies one weight sub-block; R is block diagonal by
            // weight, so the orthonormalized image stays inside it.
            const auto& t0 = info.tableaux[entries.front().row];
            const auto& g0 = info.tableaux[entries.front().col];
            std::vector<long> ri, ci;
            for (long k = 0; k < info.m; ++k) {
                if (info.tableaux[static_cast<std::size_t>(k)].weight(d) == t0.weight(d)) ri.push_back(k);
                if (info.tableaux[static_cast<std::size_t>(k)].weight(d) == g0.weight(d)) ci.push_back(k);
            }
            Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(info.m, info.m);
            for (const auto& en : entries) raw(en.row, en.col) = en.value;
            for (long i : ri)
                for (long j : ci) {
                    double v = 0.0;
                    for (long p : ri)
                        for (long q : ci) v += info.factor(p, i) * raw(p, q) * info.factor(q, j);
                    if (v != 0.0)
                        cob.ortho[r].emplace_back(bidx, OrbitBlockEntry{static_cast<std::uint32_t>(i),
                                                                        static_cast<std::uint32_t>(j), v});
                }
        }
        cob.blocks.push_back(std::move(info));
    }
    return cob;
}

// ---------------------------------------------------------------- forward / inverse maps

BlockRep BlockRep::zeros(CobPtr cob, int d_r, Gauge gauge)
{
    BlockRep b;
    b.cob = cob;
    b.d_r = d_r;
    b.gauge = gauge;
    for (const auto& info : cob->blocks) b.blocks.push_back(Eigen::MatrixXcd::Zero(d_r * info.m, d_r * info.m));
    return b;
}

namespace {

BlockRep forward(const OrbitCoefficients& x, CobPtr cob, Gauge gauge)
{
    detail::require(x.basis->spec() == cob->basis->spec(), "coefficients do not match the change of basis");
    auto out = BlockRep::zeros(cob, 1, gauge);
    const auto& table = gauge == Gauge::Raw ? cob->raw : cob->ortho;
    for (const auto& [r, v] : x.values)
        for (const auto& [b, e] : table[r]) out.blocks[b](e.row, e.col) += v * e.value;
    return out;
}

BlockRep forward_ref(const RefCoefficients& x, CobPtr cob, Gauge gauge)
{
    detail::require(x.order == RefOrder::RefFirst, "block maps need the reference first");
    detail::require(x.basis->spec() == cob->basis->spec(), "coefficients do not match the change of basis");
    auto out = BlockRep::zeros(cob, x.d_r, gauge);
    const auto& table = gauge == Gauge::Raw ? cob->raw : cob->ortho;
    for (int k = 0; k < x.d_r; ++k)
        for (int l = 0; l < x.d_r; ++l)
            for (const auto& [r, v] : x.at(k, l).values)
                for (const auto& [b, e] : table[r]) {
                    const int m = cob->blocks[b].m;
                    out.blocks[b](k * m + static_cast<int>(e.row), l * m + static_cast<int>(e.col)) += v * e.value;
                }
    return out;
}

}  // namespace

BlockRep psi(const OrbitCoefficients& x, CobPtr cob) { return forward(x, std::move(cob), Gauge::Raw); }
BlockRep psi_tilde(const OrbitCoefficients& x, CobPtr cob) { return forward(x, std::move(cob), Gauge::Ortho); }
BlockRep psi(const RefCoefficients& x, CobPtr cob) { return forward_ref(x, std::move(cob), Gauge::Raw); }
BlockRep psi_tilde(const RefCoefficients& x, CobPtr cob) { return forward_ref(x, std::move(cob), Gauge::Ortho); }

OrbitCoefficients psi_tilde_inv(const BlockRep& b)
{
    detail::require(b.gauge == Gauge::Ortho, "inverse map needs the ORTHO gauge");
    detail::require(b.d_r == 1, "use psi_tilde_inv_ref for reference-tensored blocks");
    const auto& cob = *b.cob;
    OrbitCoefficients out(cob.basis);
    for (std::uint64_t r = 0; r < cob.ortho.size(); ++r) {
        cplx acc{};
        for (const auto& [bi, e] : cob.ortho[r]) acc += cob.blocks[bi].mult * e.value * b.blocks[bi](e.row, e.col);
        if (acc != cplx{}) out.values.emplace(r, acc / cob.orbit_norm2[r]);
    }
    return out;
}

RefCoefficients psi_tilde_inv_ref(const BlockRep& b)
{
    detail::require(b.gauge == Gauge::Ortho, "inverse map needs the ORTHO gauge");
    const auto& cob = *b.cob;
    auto out = RefCoefficients::zeros(b.d_r, cob.basis, RefOrder::RefFirst);
    for (int k = 0; k < b.d_r; ++k)
        for (int l = 0; l < b.d_r; ++l) {
            auto& dst = out.at(k, l);
            for (std::uint64_t r = 0; r < cob.ortho.size(); ++r) {
                cplx acc{};
                for (const auto& [bi, e] : cob.ortho[r]) {
                    const int m = cob.blocks[bi].m;
                    acc += cob.blocks[bi].mult * e.value *
                           b.blocks[bi](k * m + static_cast<int>(e.row), l * m + static_cast<int>(e.col));
                }
                if (acc != cplx{}) dst.values.emplace(r, acc / cob.orbit_norm2[r]);
            }
        }
    return out;
}

}  // namespace permsym
