#include "permsym/oracle/dense.hpp"

#include "permsym/error.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace permsym::oracle {

long ipow(int d, int n)
{
    long p = 1;
    for (int k = 0; k < n; ++k) p *= d;
    return p;
}

std::vector<int> decode(long idx, int d, int n)
{
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int k = n - 1; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = static_cast<int>(idx % d);
        idx /= d;
    }
    return out;
}

long encode(std::span<const int> digits, int d)
{
    long idx = 0;
    for (int v : digits) idx = idx * d + v;
    return idx;
}

Eigen::MatrixXd orbit_matrix(const CountMatrix& e, int n)
{
    const int d = e.d();
    const long dim = ipow(d, n);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
    for (long i = 0; i < dim; ++i) {
        const auto mi = decode(i, d, n);
        for (long j = 0; j < dim; ++j)
            if (count_of_pair(mi, decode(j, d, n), d) == e) c(i, j) = 1.0;
    }
    return c;
}

Eigen::MatrixXcd dense_from_coeffs(const OrbitCoefficients& x)
{
    const int d = x.basis->d(), n = x.basis->n();
    const long dim = ipow(d, n);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<std::vector<int>> digits(static_cast<std::size_t>(dim));
    for (long i = 0; i < dim; ++i) digits[static_cast<std::size_t>(i)] = decode(i, d, n);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j)
            out(i, j) = x.get(count_of_pair(digits[static_cast<std::size_t>(i)], digits[static_cast<std::size_t>(j)], d));
    return out;
}

OrbitCoefficients coeffs_from_dense(const Eigen::MatrixXcd& x, BasisPtr basis)
{
    const int d = basis->d();
    OrbitCoefficients out(basis);
    const auto all = enumerate_orbits(basis->spec());
    for (std::uint64_t k = 0; k < all.size(); ++k) {
        const auto [i, j] = representative(all.orbits()[k]);
        const cplx v = x(encode(i, d), encode(j, d));
        if (v != cplx{}) out.values.emplace(k, v);
    }
    return out;
}

Eigen::MatrixXcd symmetrize(const Eigen::MatrixXcd& x, int d, int n)
{
    const long dim = ipow(d, n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<long> map(static_cast<std::size_t>(dim));
    long count = 0;
    do {
        for (long i = 0; i < dim; ++i) {
            const auto di = decode(i, d, n);
            std::vector<int> pi(di.size());
            for (int k = 0; k < n; ++k) pi[static_cast<std::size_t>(k)] = di[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
            map[static_cast<std::size_t>(i)] = encode(pi, d);
        }
        for (long i = 0; i < dim; ++i)
            for (long j = 0; j < dim; ++j) acc(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) += x(i, j);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc / static_cast<double>(count);
}

namespace {

long interleaved_index(long blocked, int d_a, int d_b, int n)
{
    const long db_n = ipow(d_b, n);
    const auto a = decode(blocked / db_n, d_a, n);
    const auto b = decode(blocked % db_n, d_b, n);
    std::vector<int> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)] * d_b + b[static_cast<std::size_t>(k)];
    return encode(c, d_a * d_b);
}

}  // namespace

Eigen::MatrixXcd interleaved_to_blocked(const Eigen::MatrixXcd& x, int d_a, int d_b, int n)
{
    const long dim = x.rows();
    std::vector<long> map(static_cast<std::size_t>(dim));
    for (long i = 0; i < dim; ++i) map[static_cast<std::size_t>(i)] = interleaved_index(i, d_a, d_b, n);
    Eigen::MatrixXcd out(dim, dim);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) out(i, j) = x(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
    return out;
}

Eigen::MatrixXcd blocked_to_interleaved(const Eigen::MatrixXcd& x, int d_a, int d_b, int n)
{
    const long dim = x.rows();
    std::vector<long> map(static_cast<std::size_t>(dim));
    for (long i = 0; i < dim; ++i) map[static_cast<std::size_t>(i)] = interleaved_index(i, d_a, d_b, n);
    Eigen::MatrixXcd out(dim, dim);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) out(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) = x(i, j);
    return out;
}

Eigen::MatrixXcd ptrace_second(const Eigen::MatrixXcd& x, long d1, long d2)
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d1, d1);
    for (long a = 0; a < d1; ++a)
        for (long b = 0; b < d1; ++b)
            for (long k = 0; k < d2; ++k) out(a, b) += x(a * d2 + k, b * d2 + k);
    return out;
}

Eigen::MatrixXcd ptrace_first(const Eigen::MatrixXcd& x, long d1, long d2)
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d2, d2);
    for (long a = 0; a < d2; ++a)
        for (long b = 0; b < d2; ++b)
            for (long k = 0; k < d1; ++k) out(a, b) += x(k * d2 + a, k * d2 + b);
    return out;
}

Eigen::MatrixXcd ptranspose_second(const Eigen::MatrixXcd& x, long d1, long d2)
{
    Eigen::MatrixXcd out(x.rows(), x.cols());
    for (long a = 0; a < d1; ++a)
        for (long u = 0; u < d2; ++u)
            for (long b = 0; b < d1; ++b)
                for (long v = 0; v < d2; ++v) out(a * d2 + u, b * d2 + v) = x(a * d2 + v, b * d2 + u);
    return out;
}

Eigen::MatrixXcd ptranspose_first(const Eigen::MatrixXcd& x, long d1, long d2)
{
    Eigen::MatrixXcd out(x.rows(), x.cols());
    for (long a = 0; a < d1; ++a)
        for (long u = 0; u < d2; ++u)
            for (long b = 0; b < d1; ++b)
                for (long v = 0; v < d2; ++v) out(a * d2 + u, b * d2 + v) = x(b * d2 + u, a * d2 + v);
    return out;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXcd kron_power(const Eigen::MatrixXcd& a, int n)
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int k = 0; k < n; ++k) out = kron(out, a);
    return out;
}

Eigen::MatrixXcd link(const Eigen::MatrixXcd& g1, const Eigen::MatrixXcd& g2, long dx, long dy, long dz)
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dx * dz, dx * dz);
    for (long x = 0; x < dx; ++x)
        for (long xp = 0; xp < dx; ++xp)
            for (long y = 0; y < dy; ++y)
                for (long yp = 0; yp < dy; ++yp) {
                    const cplx w = g1(x * dy + y, xp * dy + yp);
                    if (w == cplx{}) continue;
                    for (long z = 0; z < dz; ++z)
                        for (long zp = 0; zp < dz; ++zp) out(x * dz + z, xp * dz + zp) += w * g2(y * dz + z, yp * dz + zp);
                }
    return out;
}

Eigen::MatrixXcd random_matrix(long rows, long cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

Eigen::MatrixXcd random_psd(long dim, std::mt19937_64& rng)
{
    const auto g = random_matrix(dim, dim, rng);
    return g * g.adjoint();
}

Eigen::MatrixXcd random_cptp_choi(long d_in, long d_out, std::mt19937_64& rng, long kraus)
{
    if (kraus <= 0) kraus = d_in * d_out;
    const auto g = random_matrix(kraus * d_out, d_in, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.adjoint() * g);
    const Eigen::MatrixXcd inv_sqrt =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    const Eigen::MatrixXcd v = g * inv_sqrt;  // isometry C^{d_in} -> C^{kraus} ⊗ C^{d_out}
    Eigen::MatrixXcd choi = Eigen::MatrixXcd::Zero(d_in * d_out, d_in * d_out);
    for (long k = 0; k < kraus; ++k) {
        const Eigen::MatrixXcd kk = v.block(k * d_out, 0, d_out, d_in);
        Eigen::VectorXcd vec(d_in * d_out);
        for (long x = 0; x < d_in; ++x)
            for (long y = 0; y < d_out; ++y) vec(x * d_out + y) = kk(y, x);
        choi += vec * vec.adjoint();
    }
    return choi;
}

OrbitCoefficients random_coeffs(BasisPtr basis, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    OrbitCoefficients out(basis);
    for (std::uint64_t k = 0; k < basis->size(); ++k) out.values.emplace(k, cplx(g(rng), g(rng)));
    return out;
}

namespace {

Eigen::MatrixXcd pinv_sqrt(const Eigen::MatrixXcd& s, Eigen::MatrixXcd& kernel)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (s + s.adjoint()));
    const auto& ev = es.eigenvalues();
    const double cut = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd w(ev.size()), k(ev.size());
    for (long i = 0; i < ev.size(); ++i) {
        const bool keep = ev(i) > cut;
        w(i) = keep ? 1.0 / std::sqrt(ev(i)) : 0.0;
        k(i) = keep ? 0.0 : 1.0;
    }
    kernel = es.eigenvectors() * k.asDiagonal() * es.eigenvectors().adjoint();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double dense_fd(const Eigen::MatrixXcd& gamma_m, long d_r, long d_b, std::mt19937_64& rng, int restarts, int max_iter,
                double tol)
{
    const Eigen::MatrixXcd eye_r = Eigen::MatrixXcd::Identity(d_r, d_r);
    double best = 0.0;
    for (int rs = 0; rs < restarts; ++rs) {
        Eigen::MatrixXcd y = random_psd(d_r * d_b, rng);
        auto normalize = [&](const Eigen::MatrixXcd& x) {
            Eigen::MatrixXcd ker;
            const auto w = pinv_sqrt(ptrace_first(x, d_r, d_b), ker);
            const auto big = kron(eye_r, w);
            return Eigen::MatrixXcd(big * x * big + kron(eye_r / static_cast<double>(d_r), ker));
        };
        y = normalize(y);
        double f = (gamma_m * y).trace().real() / static_cast<double>(d_r * d_r);
        for (int it = 0; it < max_iter; ++it) {
            const Eigen::MatrixXcd x = gamma_m * y * gamma_m;
            const Eigen::MatrixXcd yn = normalize(x);
            const double fn = (gamma_m * yn).trace().real() / static_cast<double>(d_r * d_r);
            y = yn;
            const double gain = fn - f;
            f = fn;
            if (gain < tol) break;
        }
        best = std::max(best, f);
    }
    return best;
}

}  // namespace permsym::oracle

namespace permsym::oracle {

namespace {

/// Extracts the S^n block (k,l) of a matrix on R ⊗ S^n or S^n ⊗ R.
Eigen::MatrixXcd ref_block(const Eigen::MatrixXcd& x, int d_r, long dim, int k, int l, bool ref_first)
{
    if (ref_first) return x.block(k * dim, l * dim, dim, dim);
    Eigen::MatrixXcd out(dim, dim);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) out(i, j) = x(i * d_r + k, j * d_r + l);
    return out;
}

void set_ref_block(Eigen::MatrixXcd& x, const Eigen::MatrixXcd& b, int d_r, int k, int l, bool ref_first)
{
    const long dim = b.rows();
    if (ref_first) {
        x.block(k * dim, l * dim, dim, dim) = b;
        return;
    }
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) x(i * d_r + k, j * d_r + l) = b(i, j);
}

}  // namespace

Eigen::MatrixXcd symmetrize_with_reference(const Eigen::MatrixXcd& x, int d_r, int d, int n, bool ref_first)
{
    const long dim = ipow(d, n);
    Eigen::MatrixXcd out(x.rows(), x.cols());
    for (int k = 0; k < d_r; ++k)
        for (int l = 0; l < d_r; ++l)
            set_ref_block(out, symmetrize(ref_block(x, d_r, dim, k, l, ref_first), d, n), d_r, k, l, ref_first);
    return out;
}

Eigen::MatrixXcd dense_from_ref(const RefCoefficients& x)
{
    const long dim = ipow(x.basis->d(), x.basis->n());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim * x.d_r, dim * x.d_r);
    for (int k = 0; k < x.d_r; ++k)
        for (int l = 0; l < x.d_r; ++l)
            set_ref_block(out, dense_from_coeffs(x.at(k, l)), x.d_r, k, l, x.order == RefOrder::RefFirst);
    return out;
}

RefCoefficients ref_from_dense(const Eigen::MatrixXcd& x, int d_r, BasisPtr basis, RefOrder order)
{
    const long dim = ipow(basis->d(), basis->n());
    auto out = RefCoefficients::zeros(d_r, basis, order);
    for (int k = 0; k < d_r; ++k)
        for (int l = 0; l < d_r; ++l)
            out.at(k, l) = coeffs_from_dense(ref_block(x, d_r, dim, k, l, order == RefOrder::RefFirst), basis);
    return out;
}

}  // namespace permsym::oracle
