#pragma once

#include <string>
#include <vector>

#include "gss/image.hpp"

namespace gss {

// Probability mass function over a finite alphabet.
struct Pmf {
    std::vector<double> p;

    static Pmf make(std::vector<double> weights);  // normalizes; rejects bad weights
};

enum class LogBase { two, e };

// Sum of p_i*log(p_i/q_i); 0*log(0/x)=0; +inf when p_i>0 and q_i=0.
double kl_divergence(const Pmf& p, const Pmf& q, LogBase base = LogBase::two);

// 0.5*KL(p||M)+0.5*KL(q||M) with M the even mixture, base-2 logs, so the
// value lives in [0,1] and hits 1 exactly on disjoint supports.
double js_divergence(const Pmf& p, const Pmf& q);

enum class JsStatistic { image_mean, pooled_pixels };

std::string js_statistic_name(JsStatistic s);
JsStatistic js_statistic_from_name(const std::string& name);

// Histograms a scalar statistic of each set (Laplace-smoothed, one count per
// bin), then returns the JS divergence of the two histograms.
double estimate_js_images(const std::vector<ImageU8>& a, const std::vector<ImageU8>& b,
                          size_t bins, JsStatistic stat = JsStatistic::image_mean);

bool epsilon_security_check(double js_value, double epsilon);

struct CapacityReport {
    double absolute_bytes = 0.0;  // per image
    size_t size_pixels = 0;       // H*W*C
    double relative = 0.0;        // bytes per pixel
    double extraction_rate = 1.0;
    double actual = 0.0;          // relative * rate
};

CapacityReport capacity_report(double absolute_bytes, size_t h, size_t w, size_t c,
                               double extraction_rate);

double extraction_accuracy(const std::vector<uint8_t>& sent,
                           const std::vector<uint8_t>& received);

// key=value renderings used by the CLI.
std::string render_js_report(double js, size_t bins, JsStatistic stat, double epsilon);
std::string render_capacity_report(const CapacityReport& r);

}  // namespace gss
