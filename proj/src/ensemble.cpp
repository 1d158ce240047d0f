#include "gss/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gss/kernels.hpp"
#include "gss/rng.hpp"

namespace gss {

size_t default_subspace_dim(size_t feature_dim) {
    return std::min<size_t>(200, feature_dim > 1 ? feature_dim - 1 : 1);
}

namespace {

// In-place Cholesky of a symmetric positive-definite matrix (lower factor).
// Returns false when a pivot collapses.
bool cholesky(std::vector<double>& a, size_t n) {
    for (size_t j = 0; j < n; ++j) {
        double d = a[j * n + j] - kernels::ops().dot(&a[j * n], &a[j * n], j);
        if (d <= 0.0 || !std::isfinite(d)) return false;
        d = std::sqrt(d);
        a[j * n + j] = d;
        for (size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j] - kernels::ops().dot(&a[i * n], &a[j * n], j);
            a[i * n + j] = s / d;
        }
    }
    return true;
}

// Solves (L L^T) x = b given the lower Cholesky factor.
std::vector<double> cholesky_solve(const std::vector<double>& l, size_t n,
                                   const std::vector<double>& b) {
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) {
        double s = b[i] - kernels::ops().dot(&l[i * n], y.data(), i);
        y[i] = s / l[i * n + i];
    }
    std::vector<double> x(n);
    for (size_t i = n; i-- > 0;) {
        double s = y[i];
        for (size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * x[k];
        x[i] = s / l[i * n + i];
    }
    return x;
}

std::vector<double> gather(const std::vector<double>& row, const std::vector<uint32_t>& idx) {
    std::vector<double> out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out[i] = row[idx[i]];
    return out;
}

void add_scatter(std::vector<double>& s, const std::vector<double>& x,
                 const std::vector<double>& mu) {
    const size_t n = x.size();
    std::vector<double> d(n);
    for (size_t i = 0; i < n; ++i) d[i] = x[i] - mu[i];
    kernels::ops().ger_acc(s.data(), d.data(), d.data(), n, n);
}

// Threshold minimizing (P_FA + P_MD)/2 for the rule "stego iff score > t",
// scanning midpoints between consecutive sorted scores plus both extremes.
double pick_threshold(std::vector<double> cover_scores, std::vector<double> stego_scores) {
    std::vector<std::pair<double, int>> pts;  // (score, is_stego)
    pts.reserve(cover_scores.size() + stego_scores.size());
    for (double s : cover_scores) pts.push_back({s, 0});
    for (double s : stego_scores) pts.push_back({s, 1});
    std::sort(pts.begin(), pts.end());

    const double nc = static_cast<double>(cover_scores.size());
    const double ns = static_cast<double>(stego_scores.size());

    // Sweep candidates from below the minimum upward. With t below everything
    // all samples classify stego: FA = 1, MD = 0. Crossing a point moves it
    // to the cover side.
    double fa = nc, md = 0.0;
    double best_err = (fa / nc + md / ns) / 2.0;
    double best_t = pts.front().first - 1.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].second == 0)
            fa -= 1.0;
        else
            md += 1.0;
        double t = i + 1 < pts.size() ? (pts[i].first + pts[i + 1].first) / 2.0
                                      : pts[i].first + 1.0;
        if (i + 1 < pts.size() && pts[i + 1].first == pts[i].first) continue;
        double err = (fa / nc + md / ns) / 2.0;
        if (err < best_err) {
            best_err = err;
            best_t = t;
        }
    }
    return best_t;
}

}  // namespace

EnsembleModel train_ensemble(const std::vector<std::vector<double>>& cover_feats,
                             const std::vector<std::vector<double>>& stego_feats, size_t l,
                             size_t d_sub, uint64_t seed) {
    if (cover_feats.empty() || stego_feats.empty())
        throw dim_error("ensemble training needs samples of both classes");
    if (l == 0) throw config_error("ensemble needs at least one learner");
    const size_t dim = cover_feats.front().size();
    if (dim == 0) throw dim_error("ensemble: zero-dimensional features");
    if (d_sub == 0 || d_sub > dim)
        throw config_error("subspace dim must be in 1..feature dim");
    for (const auto& f : cover_feats)
        if (f.size() != dim) throw dim_error("ensemble: ragged cover features");
    for (const auto& f : stego_feats)
        if (f.size() != dim) throw dim_error("ensemble: ragged stego features");

    EnsembleModel model;
    model.dim = dim;
    model.seed = seed;
    model.learners.reserve(l);

    std::vector<uint32_t> all_idx(dim);
    for (size_t i = 0; i < dim; ++i) all_idx[i] = static_cast<uint32_t>(i);

    for (size_t li = 0; li < l; ++li) {
        Rng rng = Rng::substream(seed, li);
        std::vector<uint32_t> idx = all_idx;
        rng.shuffle(idx);
        idx.resize(d_sub);
        std::sort(idx.begin(), idx.end());

        BaseLearner learner;
        learner.subspace = idx;

        std::vector<double> mu_c(d_sub, 0.0), mu_s(d_sub, 0.0);
        for (const auto& f : cover_feats) {
            auto x = gather(f, idx);
            for (size_t i = 0; i < d_sub; ++i) mu_c[i] += x[i];
        }
        for (const auto& f : stego_feats) {
            auto x = gather(f, idx);
            for (size_t i = 0; i < d_sub; ++i) mu_s[i] += x[i];
        }
        for (double& v : mu_c) v /= static_cast<double>(cover_feats.size());
        for (double& v : mu_s) v /= static_cast<double>(stego_feats.size());

        std::vector<double> scatter(d_sub * d_sub, 0.0);
        for (const auto& f : cover_feats) add_scatter(scatter, gather(f, idx), mu_c);
        for (const auto& f : stego_feats) add_scatter(scatter, gather(f, idx), mu_s);

        std::vector<double> diff(d_sub);
        for (size_t i = 0; i < d_sub; ++i) diff[i] = mu_s[i] - mu_c[i];

        // Ridge escalation: start at 1e-6 and grow until the factor exists.
        std::vector<double> w;
        for (double reg = 1e-6;; reg *= 10.0) {
            std::vector<double> a = scatter;
            for (size_t i = 0; i < d_sub; ++i) a[i * d_sub + i] += reg;
            if (cholesky(a, d_sub)) {
                w = cholesky_solve(a, d_sub, diff);
                break;
            }
            if (reg > 1e12) {  // identity-dominated fallback: use the mean gap itself
                w = diff;
                break;
            }
        }
        learner.w = std::move(w);

        std::vector<double> sc, ss;
        sc.reserve(cover_feats.size());
        ss.reserve(stego_feats.size());
        for (const auto& f : cover_feats) {
            auto x = gather(f, idx);
            sc.push_back(kernels::ops().dot(learner.w.data(), x.data(), d_sub));
        }
        for (const auto& f : stego_feats) {
            auto x = gather(f, idx);
            ss.push_back(kernels::ops().dot(learner.w.data(), x.data(), d_sub));
        }
        learner.threshold = pick_threshold(std::move(sc), std::move(ss));
        model.learners.push_back(std::move(learner));
    }
    return model;
}

Label ensemble_classify(const EnsembleModel& model, const std::vector<double>& feats) {
    if (feats.size() != model.dim) throw dim_error("feature dim does not match ensemble");
    size_t votes = 0;
    for (const auto& learner : model.learners) {
        auto x = gather(feats, learner.subspace);
        double s = kernels::ops().dot(learner.w.data(), x.data(), x.size());
        if (s > learner.threshold) ++votes;
    }
    return 2 * votes > model.l() ? Label::stego : Label::cover;
}

PeReport compute_pe(const std::vector<Label>& predictions, const std::vector<Label>& truth) {
    if (predictions.size() != truth.size()) throw dim_error("compute_pe: length mismatch");
    PeReport r;
    size_t fa = 0, md = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Label::cover) {
            ++r.n_cover;
            if (predictions[i] == Label::stego) ++fa;
        } else {
            ++r.n_stego;
            if (predictions[i] == Label::cover) ++md;
        }
    }
    if (r.n_cover == 0 || r.n_stego == 0)
        throw dim_error("compute_pe: truth must contain both classes");
    r.p_fa = static_cast<double>(fa) / static_cast<double>(r.n_cover);
    r.p_md = static_cast<double>(md) / static_cast<double>(r.n_stego);
    r.p_e = (r.p_fa + r.p_md) / 2.0;
    return r;
}

ImageU8 lsb_embed_baseline(const ImageU8& im, double payload_bpp, uint64_t seed) {
    if (payload_bpp < 0.0 || payload_bpp > 1.0)
        throw config_error("payload must be in [0,1] bits per pixel");
    ImageU8 out = im;
    if (payload_bpp == 0.0) return out;
    size_t n_embed =
        static_cast<size_t>(std::floor(payload_bpp * static_cast<double>(im.size()) + 1e-9));
    Rng rng(seed);
    std::vector<uint32_t> idx(im.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<uint32_t>(i);
    rng.shuffle(idx);
    for (size_t i = 0; i < n_embed; ++i) {
        uint8_t bit = static_cast<uint8_t>(rng.bounded(2));
        out.px[idx[i]] = static_cast<uint8_t>((out.px[idx[i]] & 0xFEu) | bit);
    }
    return out;
}

PeReport split_protocol(const std::vector<std::vector<double>>& cover_feats,
                        const std::vector<std::vector<double>>& stego_feats, size_t l,
                        size_t d_sub, uint64_t seed, size_t splits,
                        std::vector<PeReport>* per_split) {
    if (splits == 0) throw config_error("need at least one split");
    if (cover_feats.size() < 2 || stego_feats.size() < 2)
        throw dim_error("split protocol needs >= 2 samples per class");

    PeReport mean;
    for (size_t s = 0; s < splits; ++s) {
        Rng rng = Rng::substream(seed ^ 0x5eed5eedULL, s);
        auto split_class = [&](const std::vector<std::vector<double>>& feats,
                               std::vector<std::vector<double>>& train,
                               std::vector<std::vector<double>>& test) {
            std::vector<uint32_t> idx(feats.size());
            for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<uint32_t>(i);
            rng.shuffle(idx);
            size_t half = feats.size() / 2;
            for (size_t i = 0; i < feats.size(); ++i)
                (i < half ? train : test).push_back(feats[idx[i]]);
        };
        std::vector<std::vector<double>> ctr, cte, str, ste;
        split_class(cover_feats, ctr, cte);
        split_class(stego_feats, str, ste);

        EnsembleModel model = train_ensemble(ctr, str, l, d_sub, seed + s);
        std::vector<Label> pred, truth;
        for (const auto& f : cte) {
            pred.push_back(ensemble_classify(model, f));
            truth.push_back(Label::cover);
        }
        for (const auto& f : ste) {
            pred.push_back(ensemble_classify(model, f));
            truth.push_back(Label::stego);
        }
        PeReport r = compute_pe(pred, truth);
        if (per_split) per_split->push_back(r);
        mean.p_fa += r.p_fa;
        mean.p_md += r.p_md;
        mean.p_e += r.p_e;
        mean.n_cover = r.n_cover;
        mean.n_stego = r.n_stego;
    }
    mean.p_fa /= static_cast<double>(splits);
    mean.p_md /= static_cast<double>(splits);
    mean.p_e /= static_cast<double>(splits);
    return mean;
}

std::string render_pe_report(const PeReport& r) {
    std::ostringstream os;
    os << "p_fa=" << r.p_fa << "\n"
       << "p_md=" << r.p_md << "\n"
       << "p_e=" << r.p_e << "\n"
       << "n_cover=" << r.n_cover << "\n"
       << "n_stego=" << r.n_stego << "\n";
    return os.str();
}

std::string features_to_csv(const std::vector<std::vector<double>>& feats,
                            const std::vector<Label>& labels) {
    if (feats.size() != labels.size()) throw dim_error("features/labels count mismatch");
    std::ostringstream os;
    os.precision(17);
    for (size_t i = 0; i < feats.size(); ++i) {
        for (double v : feats[i]) os << v << ',';
        os << (labels[i] == Label::stego ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace gss
