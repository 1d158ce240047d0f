#include "gss/security.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gss {

Pmf Pmf::make(std::vector<double> weights) {
    if (weights.empty()) throw dim_error("pmf needs at least one weight");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw numeric_error("pmf weight is negative or NaN");
        sum += w;
    }
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw numeric_error("pmf weights must have a positive finite sum");
    for (double& w : weights) w /= sum;
    Pmf out;
    out.p = std::move(weights);
    return out;
}

static double log_in_base(double x, LogBase base) {
    return base == LogBase::two ? std::log2(x) : std::log(x);
}

double kl_divergence(const Pmf& p, const Pmf& q, LogBase base) {
    if (p.p.size() != q.p.size()) throw dim_error("kl: alphabet sizes differ");
    double acc = 0.0;
    for (size_t i = 0; i < p.p.size(); ++i) {
        if (p.p[i] == 0.0) continue;
        if (q.p[i] == 0.0) return std::numeric_limits<double>::infinity();
        acc += p.p[i] * log_in_base(p.p[i] / q.p[i], base);
    }
    return acc;
}

double js_divergence(const Pmf& p, const Pmf& q) {
    if (p.p.size() != q.p.size()) throw dim_error("js: alphabet sizes differ");
    // Mixture built with commutative adds so js(p,q) == js(q,p) bit-exactly.
    std::vector<double> mix(p.p.size());
    for (size_t i = 0; i < mix.size(); ++i) mix[i] = (p.p[i] + q.p[i]) / 2.0;

    auto half_kl = [&](const std::vector<double>& a) {
        double acc = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0.0) continue;
            acc += a[i] * std::log2(a[i] / mix[i]);  // mix[i] > 0 whenever a[i] > 0
        }
        return acc;
    };
    return 0.5 * half_kl(p.p) + 0.5 * half_kl(q.p);
}

std::string js_statistic_name(JsStatistic s) {
    return s == JsStatistic::image_mean ? "image_mean" : "pooled_pixels";
}

JsStatistic js_statistic_from_name(const std::string& name) {
    if (name == "image_mean") return JsStatistic::image_mean;
    if (name == "pooled_pixels") return JsStatistic::pooled_pixels;
    throw config_error("unknown js statistic '" + name + "' (image_mean|pooled_pixels)");
}

static Pmf histogram_pmf(const std::vector<ImageU8>& set, size_t bins, JsStatistic stat) {
    std::vector<uint64_t> counts(bins, 0);
    auto bin_of = [&](double value) {
        // value lies in [0, 256)
        size_t b = static_cast<size_t>(value / 256.0 * static_cast<double>(bins));
        return b >= bins ? bins - 1 : b;
    };
    for (const auto& im : set) {
        if (stat == JsStatistic::image_mean) {
            double sum = 0.0;
            for (uint8_t px : im.px) sum += px;
            counts[bin_of(sum / static_cast<double>(im.size()))] += 1;
        } else {
            for (uint8_t px : im.px) counts[bin_of(px)] += 1;
        }
    }
    uint64_t total = bins;  // Laplace: one phantom count per bin
    for (uint64_t c : counts) total += c;
    std::vector<double> w(bins);
    for (size_t i = 0; i < bins; ++i)
        w[i] = static_cast<double>(counts[i] + 1) / static_cast<double>(total);
    // Normalization can miss 1.0 by a few ulps; fold the residue into bin 0.
    double sum = 0.0;
    for (double x : w) sum += x;
    w[0] += 1.0 - sum;
    return Pmf::make(std::move(w));
}

double estimate_js_images(const std::vector<ImageU8>& a, const std::vector<ImageU8>& b,
                          size_t bins, JsStatistic stat) {
    if (a.empty() || b.empty()) throw dim_error("js estimate: empty image set");
    if (bins < 2) throw config_error("js estimate needs at least 2 bins");
    return js_divergence(histogram_pmf(a, bins, stat), histogram_pmf(b, bins, stat));
}

bool epsilon_security_check(double js_value, double epsilon) {
    if (js_value < 0.0 || js_value > 1.0) throw numeric_error("js value outside [0,1]");
    return js_value <= epsilon;
}

CapacityReport capacity_report(double absolute_bytes, size_t h, size_t w, size_t c,
                               double extraction_rate) {
    if (h == 0 || w == 0 || c == 0) throw dim_error("capacity: dims must be positive");
    if (!(absolute_bytes >= 0.0)) throw config_error("absolute bytes must be nonnegative");
    if (extraction_rate < 0.0 || extraction_rate > 1.0)
        throw config_error("extraction rate must be in [0,1]");
    CapacityReport r;
    r.absolute_bytes = absolute_bytes;
    r.size_pixels = h * w * c;
    r.relative = absolute_bytes / static_cast<double>(r.size_pixels);
    r.extraction_rate = extraction_rate;
    r.actual = r.relative * extraction_rate;
    return r;
}

double extraction_accuracy(const std::vector<uint8_t>& sent,
                           const std::vector<uint8_t>& received) {
    if (sent.size() != received.size())
        throw dim_error("extraction accuracy: bit counts differ (" +
                        std::to_string(sent.size()) + " vs " + std::to_string(received.size()) +
                        ")");
    if (sent.empty()) return 1.0;
    size_t same = 0;
    for (size_t i = 0; i < sent.size(); ++i)
        if ((sent[i] & 1) == (received[i] & 1)) ++same;
    return static_cast<double>(same) / static_cast<double>(sent.size());
}

std::string render_js_report(double js, size_t bins, JsStatistic stat, double epsilon) {
    std::ostringstream os;
    os << "js_estimate=" << js << "\n"
       << "bins=" << bins << "\n"
       << "statistic=" << js_statistic_name(stat) << "\n"
       << "epsilon=" << epsilon << "\n"
       << "pass=" << (epsilon_security_check(js, epsilon) ? 1 : 0) << "\n";
    return os.str();
}

std::string render_capacity_report(const CapacityReport& r) {
    std::ostringstream os;
    os << "absolute_bytes=" << r.absolute_bytes << "\n"
       << "size_pixels=" << r.size_pixels << "\n"
       << "relative_bytes_per_pixel=" << r.relative << "\n"
       << "extraction_rate=" << r.extraction_rate << "\n"
       << "actual_bytes_per_pixel=" << r.actual << "\n";
    return os.str();
}

}  // namespace gss
