#include "permsym/channels.hpp"

#include "permsym/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace permsym {

namespace {

void require_unit(double x, const char* name)
{
    if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

ChoiMatrix identity_channel(int d)
{
    detail::require(d >= 1, "dimension must be positive");
    ChoiMatrix c{d, d, Eigen::MatrixXcd::Zero(d * d, d * d), std::nullopt};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) c.gamma(i * d + i, j * d + j) = 1.0;
    return c;
}

ChoiMatrix adc(double gamma)
{
    require_unit(gamma, "damping probability");
    ChoiMatrix c{2, 2, Eigen::MatrixXcd::Zero(4, 4), std::nullopt};
    c.gamma(0, 0) = 1.0;
    c.gamma(0, 3) = c.gamma(3, 0) = std::sqrt(1.0 - gamma);
    c.gamma(2, 2) = gamma;
    c.gamma(3, 3) = 1.0 - gamma;
    return c;
}

ChoiMatrix depolarizing(double p)
{
    require_unit(p, "depolarizing probability");
    ChoiMatrix c = identity_channel(2);
    c.gamma = (1.0 - p) * c.gamma + (p / 2.0) * Eigen::MatrixXcd::Identity(4, 4);
    return c;
}

ChoiMatrix replacement(int d_in, int d_out)
{
    detail::require(d_in >= 1 && d_out >= 1, "dimensions must be positive");
    const int dim = d_in * d_out;
    return {d_in, d_out, Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(d_out), std::nullopt};
}

ChoiMatrix flagged(const std::vector<ChoiMatrix>& channels, const std::vector<double>& probs)
{
    detail::require(!channels.empty() && channels.size() == probs.size(), "need one probability per channel");
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("flag probabilities must sum to 1");
    FlagStructure fs;
    int d_out = 0;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        detail::require(channels[i].d_in == channels[0].d_in, "flagged channels must share the input dimension");
        detail::require(!channels[i].flags, "nested flags are not supported");
        detail::require(probs[i] >= 0.0, "flag probabilities must be nonnegative");
        fs.block_dims.push_back(channels[i].d_out);
        d_out += channels[i].d_out;
    }
    fs.probs = probs;
    const int d_in = channels[0].d_in;
    ChoiMatrix c{d_in, d_out, Eigen::MatrixXcd::Zero(d_in * d_out, d_in * d_out), fs};
    int off = 0;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const int di = channels[i].d_out;
        for (int a = 0; a < d_in; ++a)
            for (int b = 0; b < di; ++b)
                for (int a2 = 0; a2 < d_in; ++a2)
                    for (int b2 = 0; b2 < di; ++b2)
                        c.gamma(a * d_out + off + b, a2 * d_out + off + b2) =
                            probs[i] * channels[i].gamma(a * di + b, a2 * di + b2);
        off += di;
    }
    return c;
}

ChoiMatrix tensor_product(const ChoiMatrix& x, const ChoiMatrix& y)
{
    detail::require(!x.flags && !y.flags, "tensor products of flagged channels are not supported");
    const int di = x.d_in * y.d_in, dout = x.d_out * y.d_out;
    ChoiMatrix c{di, dout, Eigen::MatrixXcd::Zero(di * dout, di * dout), std::nullopt};
    auto idx = [&](int a1, int a2, int b1, int b2) { return (a1 * y.d_in + a2) * dout + b1 * y.d_out + b2; };
    for (int a1 = 0; a1 < x.d_in; ++a1)
        for (int b1 = 0; b1 < x.d_out; ++b1)
            for (int a1p = 0; a1p < x.d_in; ++a1p)
                for (int b1p = 0; b1p < x.d_out; ++b1p) {
                    const cplx v = x.gamma(a1 * x.d_out + b1, a1p * x.d_out + b1p);
                    if (v == cplx{}) continue;
                    for (int a2 = 0; a2 < y.d_in; ++a2)
                        for (int b2 = 0; b2 < y.d_out; ++b2)
                            for (int a2p = 0; a2p < y.d_in; ++a2p)
                                for (int b2p = 0; b2p < y.d_out; ++b2p)
                                    c.gamma(idx(a1, a2, b1, b2), idx(a1p, a2p, b1p, b2p)) =
                                        v * y.gamma(a2 * y.d_out + b2, a2p * y.d_out + b2p);
                }
    return c;
}

ChoiResidual choi_residual(const ChoiMatrix& c)
{
    ChoiResidual r;
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(c.d_in, c.d_in);
    for (int a = 0; a < c.d_in; ++a)
        for (int a2 = 0; a2 < c.d_in; ++a2)
            for (int b = 0; b < c.d_out; ++b) t(a, a2) += c.gamma(a * c.d_out + b, a2 * c.d_out + b);
    r.trace = (t - Eigen::MatrixXcd::Identity(c.d_in, c.d_in)).cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd h = 0.5 * (c.gamma + c.gamma.adjoint());
    r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues().minCoeff();
    return r;
}

void validate_channel(const ChoiMatrix& c, double tol)
{
    const long dim = static_cast<long>(c.d_in) * c.d_out;
    if (c.d_in < 1 || c.d_out < 1 || c.gamma.rows() != dim || c.gamma.cols() != dim)
        throw ArgumentError("Choi matrix has the wrong shape");
    if ((c.gamma - c.gamma.adjoint()).cwiseAbs().maxCoeff() > tol) throw ArgumentError("Choi matrix is not Hermitian");
    const auto r = choi_residual(c);
    if (r.min_eigenvalue < -tol) throw ArgumentError("Choi matrix is not positive semidefinite");
    if (r.trace > tol) throw ArgumentError("channel is not trace preserving");
    if (c.flags) {
        const auto& f = *c.flags;
        if (f.block_dims.size() != f.probs.size()) throw ArgumentError("flag structure is inconsistent");
        if (std::accumulate(f.block_dims.begin(), f.block_dims.end(), 0) != c.d_out)
            throw ArgumentError("flag blocks do not cover the output");
    }
}

double entanglement_fidelity(const ChoiMatrix& c)
{
    if (c.d_in != c.d_out) throw ArgumentError("entanglement fidelity needs equal input and output dimensions");
    const int d = c.d_in;
    cplx s{};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s += c.gamma(i * d + i, j * d + j);
    return s.real() / (d * d);
}

double adc_uncoded(double gamma)
{
    const double h = (1.0 + std::sqrt(1.0 - gamma)) / 2.0;
    return h * h;
}

double depolarizing_uncoded(double p) { return 1.0 - 0.75 * p; }

double leung4(double g)
{
    const double s = std::sqrt(1.0 + std::pow(g - 1.0, 4)) / (2.0 * std::sqrt(2.0));
    return 0.5 + s + g - s * g - 3.75 * g * g + 3.5 * g * g * g - std::pow(g, 4);
}

double fivequbit(double p)
{
    return 1.0 - 45.0 / 8.0 * p * p + 75.0 / 8.0 * std::pow(p, 3) - 45.0 / 8.0 * std::pow(p, 4) + 9.0 / 8.0 * std::pow(p, 5);
}

double reference_curve(ReferenceKind kind, double param)
{
    return kind == ReferenceKind::Leung4 ? leung4(param) : fivequbit(param);
}

namespace {

using nlohmann::json;

template <typename T>
T field(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(where + "." + key + ": wrong type");
    }
}

Eigen::MatrixXcd read_entries(const json& j, int d_in, int d_out, const std::string& where)
{
    const int dim = d_in * d_out;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    if (!j.contains("entries") || !j.at("entries").is_array()) throw ParseError(where + ": missing array \"entries\"");
    const auto& arr = j.at("entries");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string at = where + ".entries[" + std::to_string(k) + "]";
        const int row = field<int>(arr[k], "row", at), col = field<int>(arr[k], "col", at);
        if (row < 0 || row >= dim || col < 0 || col >= dim) throw ParseError(at + ": index outside the composite space");
        const double re = arr[k].contains("re") ? field<double>(arr[k], "re", at) : 0.0;
        const double im = arr[k].contains("im") ? field<double>(arr[k], "im", at) : 0.0;
        m(row, col) += cplx(re, im);
    }
    return m;
}

json write_entries(const Eigen::MatrixXcd& m)
{
    json arr = json::array();
    for (long i = 0; i < m.rows(); ++i)
        for (long k = 0; k < m.cols(); ++k)
            if (m(i, k) != cplx{})
                arr.push_back({{"row", i}, {"col", k}, {"re", m(i, k).real()}, {"im", m(i, k).imag()}});
    return arr;
}

}  // namespace

ChoiMatrix channel_from_json(const json& j)
{
    const std::string root = "channel";
    const int d_in = field<int>(j, "d_in", root);
    if (d_in < 1) throw ParseError(root + ".d_in: must be positive");
    const std::string norm = j.contains("normalization") ? field<std::string>(j, "normalization", root) : "gamma";
    if (norm != "gamma" && norm != "phi") throw ParseError(root + ".normalization: expected \"gamma\" or \"phi\"");
    const double scale = norm == "phi" ? d_in : 1.0;

    ChoiMatrix c;
    if (j.contains("flags")) {
        const auto& flags = j.at("flags");
        if (!flags.is_array() || flags.empty()) throw ParseError(root + ".flags: expected a non-empty array");
        std::vector<ChoiMatrix> parts;
        std::vector<double> probs;
        for (std::size_t i = 0; i < flags.size(); ++i) {
            const std::string at = root + ".flags[" + std::to_string(i) + "]";
            const double p = field<double>(flags[i], "prob", at);
            const int d_out = flags[i].contains("d_out") ? field<int>(flags[i], "d_out", at) : field<int>(j, "d_out", root);
            if (d_out < 1) throw ParseError(at + ".d_out: must be positive");
            parts.push_back({d_in, d_out, scale * read_entries(flags[i], d_in, d_out, at), std::nullopt});
            probs.push_back(p);
        }
        try {
            c = flagged(parts, probs);
        } catch (const ArgumentError& e) {
            throw ParseError(root + ".flags: " + e.what());
        }
    } else {
        const int d_out = field<int>(j, "d_out", root);
        if (d_out < 1) throw ParseError(root + ".d_out: must be positive");
        c = {d_in, d_out, scale * read_entries(j, d_in, d_out, root), std::nullopt};
    }
    try {
        validate_channel(c, 1e-9);
    } catch (const ArgumentError& e) {
        throw ParseError(root + ": " + e.what());
    }
    return c;
}

json channel_to_json(const ChoiMatrix& c)
{
    json j{{"d_in", c.d_in}, {"d_out", c.d_out}, {"normalization", "gamma"}};
    if (!c.flags) {
        j["entries"] = write_entries(c.gamma);
        return j;
    }
    json flags = json::array();
    int off = 0;
    for (std::size_t i = 0; i < c.flags->block_dims.size(); ++i) {
        const int di = c.flags->block_dims[i];
        const double p = c.flags->probs[i];
        Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(c.d_in * di, c.d_in * di);
        for (int a = 0; a < c.d_in; ++a)
            for (int b = 0; b < di; ++b)
                for (int a2 = 0; a2 < c.d_in; ++a2)
                    for (int b2 = 0; b2 < di; ++b2)
                        blk(a * di + b, a2 * di + b2) = c.gamma(a * c.d_out + off + b, a2 * c.d_out + off + b2);
        if (p > 0) blk /= p;
        flags.push_back({{"prob", p}, {"d_out", di}, {"entries", write_entries(blk)}});
        off += di;
    }
    j["flags"] = flags;
    return j;
}

}  // namespace permsym
