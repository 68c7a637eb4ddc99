#include "permsym/block_space.hpp"

#include "permsym/error.hpp"

#include <Eigen/Eigenvalues>

namespace permsym {

PinvSqrt pinv_sqrt(const Eigen::MatrixXcd& x)
{
    const Eigen::MatrixXcd h = 0.5 * (x + x.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const auto& ev = es.eigenvalues();
    const auto& u = es.eigenvectors();
    const double top = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    Eigen::VectorXd ker = Eigen::VectorXd::Zero(ev.size());
    for (long i = 0; i < ev.size(); ++i) {
        if (top > 0 && ev(i) > kPinvCutoff * top)
            inv(i) = 1.0 / std::sqrt(ev(i));
        else
            ker(i) = 1.0;
    }
    return {u * inv.cast<cplx>().asDiagonal() * u.adjoint(), u * ker.cast<cplx>().asDiagonal() * u.adjoint()};
}

namespace {

void require_ortho(const BlockRep& b)
{
    if (b.gauge != Gauge::Ortho) throw ArgumentError("operation requires the ORTHO gauge");
}

void require_compatible(const BlockRep& a, const BlockRep& b)
{
    require_ortho(a);
    require_ortho(b);
    detail::require(a.cob == b.cob && a.d_r == b.d_r, "block representations are not compatible");
}

}  // namespace

cplx block_trace(const BlockRep& b)
{
    require_ortho(b);
    cplx s{};
    for (std::size_t k = 0; k < b.blocks.size(); ++k) s += b.mult(k) * b.blocks[k].trace();
    return s;
}

cplx block_hs(const BlockRep& a, const BlockRep& b)
{
    require_compatible(a, b);
    cplx s{};
    for (std::size_t k = 0; k < b.blocks.size(); ++k) s += a.mult(k) * (a.blocks[k].adjoint() * b.blocks[k]).trace();
    return s;
}

cplx block_pairing(const BlockRep& a, const BlockRep& b)
{
    require_compatible(a, b);
    cplx s{};
    for (std::size_t k = 0; k < b.blocks.size(); ++k)
        s += a.mult(k) * (a.blocks[k].transpose().array() * b.blocks[k].array()).sum();
    return s;
}

std::vector<Eigen::MatrixXcd> reference_trace(const BlockRep& b)
{
    std::vector<Eigen::MatrixXcd> out;
    for (std::size_t k = 0; k < b.blocks.size(); ++k) {
        const long m = b.cob->blocks[k].m;
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(m, m);
        for (int r = 0; r < b.d_r; ++r) s += b.blocks[k].block(r * m, r * m, m, m);
        out.push_back(std::move(s));
    }
    return out;
}

Eigen::MatrixXcd global_trace(const BlockRep& b)
{
    require_ortho(b);
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(b.d_r, b.d_r);
    for (std::size_t k = 0; k < b.blocks.size(); ++k) {
        const long m = b.cob->blocks[k].m;
        for (int i = 0; i < b.d_r; ++i)
            for (int j = 0; j < b.d_r; ++j) t(i, j) += b.mult(k) * b.blocks[k].block(i * m, j * m, m, m).trace();
    }
    return t;
}

std::vector<double> cpu_residual(const BlockRep& b)
{
    require_ortho(b);
    std::vector<double> out;
    for (const auto& s : reference_trace(b))
        out.push_back(s.rows() ? (s - Eigen::MatrixXcd::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff() : 0.0);
    return out;
}

double cptp_residual(const BlockRep& b)
{
    const auto t = global_trace(b);
    return (t - Eigen::MatrixXcd::Identity(b.d_r, b.d_r)).cwiseAbs().maxCoeff();
}

void enforce_cpu(BlockRep& b)
{
    require_ortho(b);
    const auto traces = reference_trace(b);
    const Eigen::MatrixXcd id_r = Eigen::MatrixXcd::Identity(b.d_r, b.d_r);
    for (std::size_t k = 0; k < b.blocks.size(); ++k) {
        const auto p = pinv_sqrt(traces[k]);
        const Eigen::MatrixXcd s = kron_blocks(id_r, p.inv_sqrt);
        b.blocks[k] = s * b.blocks[k] * s + kron_blocks(id_r / static_cast<double>(b.d_r), p.kernel);
    }
}

void enforce_cptp(BlockRep& b)
{
    require_ortho(b);
    const auto p = pinv_sqrt(global_trace(b));
    for (std::size_t k = 0; k < b.blocks.size(); ++k) {
        const long m = b.cob->blocks[k].m;
        const Eigen::MatrixXcd s = kron_blocks(p.inv_sqrt, Eigen::MatrixXcd::Identity(m, m));
        b.blocks[k] = s * b.blocks[k] * s;
    }
    if (p.kernel.cwiseAbs().maxCoeff() > 0) {
        detail::require(!b.blocks.empty() && b.mult(0) == 1.0, "kernel completion needs a multiplicity-one block");
        const long m = b.cob->blocks[0].m;
        Eigen::MatrixXcd e0 = Eigen::MatrixXcd::Zero(m, m);
        e0(0, 0) = 1.0;
        b.blocks[0] += kron_blocks(p.kernel, e0);
    }
}

Eigen::MatrixXcd kron_blocks(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

PartialTransposeMap::PartialTransposeMap(CobPtr cob, int d_a, int d_b, Side side) : cob_(std::move(cob))
{
    const auto& c = *cob_;
    detail::require(c.basis->d() == d_a * d_b, "change of basis does not match the bipartite dimensions");
    long total = 0;
    for (const auto& blk : c.blocks) {
        offsets_.push_back(total);
        total += static_cast<long>(blk.m) * blk.m;
    }
    auto flat = [&](std::uint32_t bi, const OrbitBlockEntry& e) {
        return offsets_[bi] + static_cast<long>(e.row) * c.blocks[bi].m + e.col;
    };
    std::vector<Eigen::Triplet<cplx>> trips;
    for (std::uint64_t r = 0; r < c.ortho.size(); ++r) {
        if (c.ortho[r].empty()) continue;
        const auto r2 = c.basis->index(partial_transpose(c.basis->orbit(r), d_a, d_b, side));
        for (const auto& [bo, eo] : c.ortho[r2])
            for (const auto& [bi, ei] : c.ortho[r])
                trips.emplace_back(flat(bo, eo), flat(bi, ei),
                                   eo.value * c.blocks[bi].mult * ei.value / c.orbit_norm2[r]);
    }
    map_.resize(total, total);
    map_.setFromTriplets(trips.begin(), trips.end());
}

BlockRep PartialTransposeMap::apply(const BlockRep& b) const
{
    require_ortho(b);
    detail::require(b.cob == cob_ && b.d_r == 1, "partial transpose map built for a different representation");
    Eigen::VectorXcd v(map_.cols());
    for (std::size_t k = 0; k < b.blocks.size(); ++k) {
        const long m = cob_->blocks[k].m;
        for (long i = 0; i < m; ++i)
            for (long j = 0; j < m; ++j) v(offsets_[k] + i * m + j) = b.blocks[k](i, j);
    }
    const Eigen::VectorXcd w = map_ * v;
    BlockRep out = BlockRep::zeros(cob_, 1, Gauge::Ortho);
    for (std::size_t k = 0; k < out.blocks.size(); ++k) {
        const long m = cob_->blocks[k].m;
        for (long i = 0; i < m; ++i)
            for (long j = 0; j < m; ++j) out.blocks[k](i, j) = w(offsets_[k] + i * m + j);
    }
    return out;
}

BlockRep block_partial_transpose(const BlockRep& b, int d_a, int d_b, Side side)
{
    return PartialTransposeMap(b.cob, d_a, d_b, side).apply(b);
}

}  // namespace permsym
