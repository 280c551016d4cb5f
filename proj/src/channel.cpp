#include "rics/channel.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace rics {

namespace {

constexpr std::uint64_t kTagMR = 0x6d52ULL;
constexpr std::uint64_t kTagRB = 0x5242ULL;
constexpr std::uint64_t kTagRN = 0x526eULL;
constexpr std::uint64_t kTagMB = 0x6d42ULL;
constexpr std::uint64_t kTagN = 0x6eULL;
constexpr std::uint64_t kTagMN = 0x6d6eULL;
constexpr std::uint64_t kTagNB = 0x6e42ULL;

constexpr double kHalfWavelengthSpacing = 0.5;

double clamped_distance(const Vec3& a, const Vec3& b) {
    return std::max(distance(a, b), 1.0);
}

cplx rayleigh(double pl, std::mt19937_64& rng) {
    return pl * complex_gaussian(rng);
}

}  // namespace

double path_loss(double d_m, double c0_linear, double exponent) {
    if (d_m < 1.0)
        throw DomainError("path_loss: distance below the 1 m reference");
    return std::sqrt(c0_linear * std::pow(d_m, -exponent));
}

CVec ula_steering(int num_elements, double angle_rad, double spacing_wavelengths) {
    CVec v(static_cast<std::size_t>(num_elements));
    const double phase_step = 2.0 * kPi * spacing_wavelengths * std::sin(angle_rad);
    for (int l = 0; l < num_elements; ++l)
        v[l] = std::polar(1.0, phase_step * l);
    return v;
}

CVec sample_rician(const CVec& los, double kappa, double pl, std::mt19937_64& rng) {
    CVec out(los.size());
    if (std::isinf(kappa)) {
        for (std::size_t l = 0; l < los.size(); ++l) out[l] = pl * los[l];
        return out;
    }
    const double w_los = std::sqrt(kappa / (1.0 + kappa));
    const double w_nlos = std::sqrt(1.0 / (1.0 + kappa));
    for (std::size_t l = 0; l < los.size(); ++l)
        out[l] = pl * (w_los * los[l] + w_nlos * complex_gaussian(rng));
    return out;
}

CVec sample_rician(const CVec& los, double kappa, double pl, std::uint64_t seed) {
    auto rng = substream(seed, 0x52494349ULL);
    return sample_rician(los, kappa, pl, rng);
}

cplx cascaded_gain(const CVec& h_out, const CVec& diag, const CVec& h_in,
                   cplx h_direct) {
    if (h_out.size() != diag.size() || diag.size() != h_in.size())
        throw LengthMismatch("cascaded_gain: vector lengths differ");
    cplx acc = h_direct;
    for (std::size_t l = 0; l < diag.size(); ++l)
        acc += h_out[l] * diag[l] * h_in[l];
    return acc;
}

ChannelSet assemble_channels(const Scenario& sc, const ScenarioConfig& cfg,
                             std::uint64_t seed) {
    const int m_cnt = static_cast<int>(sc.cv_positions.size());
    const int n_cnt = static_cast<int>(sc.v2v_tx_positions.size());
    const int len = cfg.num_elements;
    const double c0 = cfg.pathloss_ref_linear();
    const double exp_pl = cfg.pathloss_exponent;
    const double kappa = cfg.rician_factor;

    ChannelSet cs;
    cs.num_cvs = m_cnt;
    cs.num_pairs = n_cnt;
    cs.num_elements = len;
    cs.kappa_mR = kappa;
    cs.kappa_Rn = kappa;

    // CV -> RICS cascaded hops.
    cs.h_mR.resize(m_cnt);
    cs.los_mR.resize(m_cnt);
    cs.pl_mR.resize(m_cnt);
    for (int m = 0; m < m_cnt; ++m) {
        const double d = clamped_distance(sc.cv_positions[m], cfg.rics_position);
        cs.pl_mR[m] = path_loss(d, c0, exp_pl);
        cs.los_mR[m] = ula_steering(
            len, azimuth(cfg.rics_position, sc.cv_positions[m]), kHalfWavelengthSpacing);
        auto rng = substream(seed, kTagMR, static_cast<std::uint64_t>(m));
        cs.h_mR[m] = sample_rician(cs.los_mR[m], kappa, cs.pl_mR[m], rng);
    }

    // RICS -> BS hop.
    {
        const double d = clamped_distance(cfg.rics_position, cfg.bs_position);
        const double pl = path_loss(d, c0, exp_pl);
        const CVec los = ula_steering(
            len, azimuth(cfg.rics_position, cfg.bs_position), kHalfWavelengthSpacing);
        auto rng = substream(seed, kTagRB);
        cs.h_RB = sample_rician(los, kappa, pl, rng);
    }

    // RICS -> Rx hops.
    cs.h_Rn.resize(n_cnt);
    cs.los_Rn.resize(n_cnt);
    cs.pl_Rn.resize(n_cnt);
    for (int n = 0; n < n_cnt; ++n) {
        const double d = clamped_distance(cfg.rics_position, sc.v2v_rx_positions[n]);
        cs.pl_Rn[n] = path_loss(d, c0, exp_pl);
        cs.los_Rn[n] = ula_steering(
            len, azimuth(cfg.rics_position, sc.v2v_rx_positions[n]), kHalfWavelengthSpacing);
        auto rng = substream(seed, kTagRN, static_cast<std::uint64_t>(n));
        cs.h_Rn[n] = sample_rician(cs.los_Rn[n], kappa, cs.pl_Rn[n], rng);
    }

    // Direct links, Rayleigh.
    cs.h_mB.resize(m_cnt);
    for (int m = 0; m < m_cnt; ++m) {
        const double d = clamped_distance(sc.cv_positions[m], cfg.bs_position);
        auto rng = substream(seed, kTagMB, static_cast<std::uint64_t>(m));
        cs.h_mB[m] = rayleigh(path_loss(d, c0, exp_pl), rng);
    }
    cs.h_n.resize(n_cnt);
    cs.pl_n.resize(n_cnt);
    for (int n = 0; n < n_cnt; ++n) {
        const double d = clamped_distance(sc.v2v_tx_positions[n], sc.v2v_rx_positions[n]);
        cs.pl_n[n] = path_loss(d, c0, exp_pl);
        auto rng = substream(seed, kTagN, static_cast<std::uint64_t>(n));
        cs.h_n[n] = rayleigh(cs.pl_n[n], rng);
    }
    cs.h_nB.resize(n_cnt);
    for (int n = 0; n < n_cnt; ++n) {
        const double d = clamped_distance(sc.v2v_tx_positions[n], cfg.bs_position);
        auto rng = substream(seed, kTagNB, static_cast<std::uint64_t>(n));
        cs.h_nB[n] = rayleigh(path_loss(d, c0, exp_pl), rng);
    }
    cs.h_mn.assign(m_cnt, std::vector<cplx>(n_cnt));
    cs.pl_mn.assign(m_cnt, std::vector<double>(n_cnt));
    for (int m = 0; m < m_cnt; ++m) {
        for (int n = 0; n < n_cnt; ++n) {
            const double d = clamped_distance(sc.cv_positions[m], sc.v2v_rx_positions[n]);
            cs.pl_mn[m][n] = path_loss(d, c0, exp_pl);
            auto rng = substream(seed, kTagMN, static_cast<std::uint64_t>(m),
                                 static_cast<std::uint64_t>(n));
            cs.h_mn[m][n] = rayleigh(cs.pl_mn[m][n], rng);
        }
    }
    return cs;
}

ChannelSet ChannelSet::normalized() const {
    ChannelSet out = *this;
    for (int m = 0; m < num_cvs; ++m) {
        for (auto& h : out.h_mR[m]) h /= pl_mR[m];
        out.pl_mR[m] = 1.0;
    }
    for (int n = 0; n < num_pairs; ++n) {
        for (auto& h : out.h_Rn[n]) h /= pl_Rn[n];
        out.pl_Rn[n] = 1.0;
        out.h_n[n] /= pl_n[n];
        out.pl_n[n] = 1.0;
        for (int m = 0; m < num_cvs; ++m) {
            out.h_mn[m][n] /= pl_mn[m][n];
            out.pl_mn[m][n] = 1.0;
        }
    }
    return out;
}

namespace {

using nlohmann::json;

json cvec_to_json(const CVec& v) {
    json arr = json::array();
    for (const auto& z : v) arr.push_back({z.real(), z.imag()});
    return arr;
}

CVec cvec_from_json(const json& arr) {
    CVec v;
    v.reserve(arr.size());
    for (const auto& p : arr) v.emplace_back(p[0].get<double>(), p[1].get<double>());
    return v;
}

}  // namespace

std::string channels_to_json(const ChannelSet& cs) {
    json j;
    j["num_cvs"] = cs.num_cvs;
    j["num_pairs"] = cs.num_pairs;
    j["num_elements"] = cs.num_elements;
    j["kappa_mR"] = cs.kappa_mR;
    j["kappa_Rn"] = cs.kappa_Rn;
    j["h_mB"] = cvec_to_json(cs.h_mB);
    j["h_RB"] = cvec_to_json(cs.h_RB);
    j["h_n"] = cvec_to_json(cs.h_n);
    j["h_nB"] = cvec_to_json(cs.h_nB);
    for (const auto& v : cs.h_mR) j["h_mR"].push_back(cvec_to_json(v));
    for (const auto& v : cs.h_Rn) j["h_Rn"].push_back(cvec_to_json(v));
    for (const auto& v : cs.h_mn) j["h_mn"].push_back(cvec_to_json(v));
    for (const auto& v : cs.los_mR) j["los_mR"].push_back(cvec_to_json(v));
    for (const auto& v : cs.los_Rn) j["los_Rn"].push_back(cvec_to_json(v));
    j["pl_mR"] = cs.pl_mR;
    j["pl_Rn"] = cs.pl_Rn;
    j["pl_mn"] = cs.pl_mn;
    j["pl_n"] = cs.pl_n;
    return j.dump();
}

ChannelSet channels_from_json(const std::string& text) {
    const json j = json::parse(text);
    ChannelSet cs;
    cs.num_cvs = j["num_cvs"].get<int>();
    cs.num_pairs = j["num_pairs"].get<int>();
    cs.num_elements = j["num_elements"].get<int>();
    cs.kappa_mR = j["kappa_mR"].get<double>();
    cs.kappa_Rn = j["kappa_Rn"].get<double>();
    cs.h_mB = cvec_from_json(j["h_mB"]);
    cs.h_RB = cvec_from_json(j["h_RB"]);
    cs.h_n = cvec_from_json(j["h_n"]);
    cs.h_nB = cvec_from_json(j["h_nB"]);
    for (const auto& v : j["h_mR"]) cs.h_mR.push_back(cvec_from_json(v));
    for (const auto& v : j["h_Rn"]) cs.h_Rn.push_back(cvec_from_json(v));
    for (const auto& v : j["h_mn"]) cs.h_mn.push_back(cvec_from_json(v));
    for (const auto& v : j["los_mR"]) cs.los_mR.push_back(cvec_from_json(v));
    for (const auto& v : j["los_Rn"]) cs.los_Rn.push_back(cvec_from_json(v));
    cs.pl_mR = j["pl_mR"].get<std::vector<double>>();
    cs.pl_Rn = j["pl_Rn"].get<std::vector<double>>();
    cs.pl_mn = j["pl_mn"].get<std::vector<std::vector<double>>>();
    cs.pl_n = j["pl_n"].get<std::vector<double>>();
    return cs;
}

}  // namespace rics
