#include "gss/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gss/data.hpp"
#include "gss/ensemble.hpp"
#include "gss/gan.hpp"
#include "gss/sampler.hpp"
#include "gss/security.hpp"
#include "gss/spam.hpp"

namespace fs = std::filesystem;

namespace gss {

// ---------------------------------------------------------------- RunConfig

static std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open config " + path);
    RunConfig cfg;
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        cfg.kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return cfg;
}

void RunConfig::set_pair(const std::string& pair) {
    size_t eq = pair.find('=');
    if (eq == std::string::npos) throw config_error("expected key=value, got '" + pair + "'");
    kv[trim(pair.substr(0, eq))] = trim(pair.substr(eq + 1));
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

std::string RunConfig::require(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw config_error("missing required config key '" + key + "'");
    return it->second;
}

uint64_t RunConfig::get_u64(const std::string& key, uint64_t fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "' wants an unsigned integer, got '" + it->second +
                           "'");
    }
}

size_t RunConfig::get_size(const std::string& key, size_t fallback) const {
    return static_cast<size_t>(get_u64(key, fallback));
}

double RunConfig::get_f64(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "' wants a number, got '" + it->second + "'");
    }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw config_error("key '" + key + "' wants a boolean, got '" + v + "'");
}

static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

std::vector<size_t> RunConfig::get_size_list(const std::string& key,
                                             const std::vector<size_t>& fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::vector<size_t> out;
    for (const auto& tok : split_list(it->second)) {
        try {
            out.push_back(std::stoull(tok));
        } catch (const std::exception&) {
            throw config_error("key '" + key + "' wants integers, got '" + tok + "'");
        }
    }
    if (out.empty()) throw config_error("key '" + key + "' is an empty list");
    return out;
}

std::vector<std::string> RunConfig::get_str_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    auto out = split_list(it->second);
    if (out.empty()) throw config_error("key '" + key + "' is an empty list");
    return out;
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
    return os.str();
}

// ------------------------------------------------------------ shared pieces

namespace {

std::string out_dir(const RunConfig& cfg) {
    std::string dir = cfg.require("out");
    fs::create_directories(dir);
    return dir;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write " + path);
    os << content;
    if (!os) throw io_error("short write to " + path);
}

std::string config_header(const RunConfig& cfg) {
    std::ostringstream os;
    os << "# config\n" << cfg.echo() << "# end config\n";
    return os.str();
}

CorruptionMask resolve_mask(const RunConfig& cfg, size_t h, size_t w) {
    if (cfg.has("mask")) {
        CorruptionMask m = mask_from_image(read_pgm(cfg.require("mask")));
        if (m.h != h || m.w != w)
            throw dim_error("mask file dims " + std::to_string(m.w) + "x" +
                            std::to_string(m.h) + " do not match " + std::to_string(w) + "x" +
                            std::to_string(h));
        return m;
    }
    MaskKind kind = mask_kind_from_name(cfg.get("mask_kind", "random90"));
    return gen_corruption_mask(kind, h, w, cfg.get_u64("mask_seed", 1),
                               cfg.get_f64("mask_missing", 0.0));
}

GrilleKey resolve_key(const RunConfig& cfg) {
    GrilleKey key;
    std::string seed = cfg.require("key_seed");
    if (seed.empty()) throw config_error("key_seed must be nonempty");
    key.seed.assign(seed.begin(), seed.end());
    key.rho = cfg.get_f64("rho", 0.5);
    key.bpi = static_cast<int>(cfg.get_u64("bpi", 1));
    return key;
}

ImageU8 resolve_base(const RunConfig& cfg, size_t h, size_t w, uint64_t seed_offset = 0) {
    if (cfg.has("base")) {
        ImageU8 im = read_pgm(cfg.require("base"));
        if (im.h != h || im.w != w) throw dim_error("base image dims do not match generator");
        return im;
    }
    SynthKind kind = synth_kind_from_name(cfg.get("base_kind", "gradients"));
    uint64_t seed = cfg.get_u64("base_seed", 1) + seed_offset;
    return gen_synthetic_dataset(kind, 1, h, w, seed).images.front();
}

Message resolve_message(const RunConfig& cfg, uint64_t seed_offset = 0) {
    Message m;
    if (cfg.has("message")) {
        m.bits = read_bits(cfg.require("message"));
        return m;
    }
    size_t nbits = cfg.get_size("message_bits", 0);
    if (nbits == 0) return m;  // empty message: pure completion
    Rng rng(cfg.get_u64("message_seed", 1) + seed_offset);
    m.bits.resize(nbits);
    for (auto& b : m.bits) b = static_cast<uint8_t>(rng.bounded(2));
    return m;
}

SearchConfig resolve_search(const RunConfig& cfg) {
    SearchConfig sc;
    sc.iterations = cfg.get_size("iters", 1000);
    sc.lr = cfg.get_f64("lr_z", 0.03);
    sc.lambda = cfg.get_f64("lambda", 0.1);
    sc.seed = cfg.get_u64("z_seed", 1);
    sc.snapshot_every = cfg.get_size("snapshot_every", 30);
    return sc;
}

// Dataset from data_dir, or comma list of synthetic kinds (n images each).
Dataset resolve_dataset(const RunConfig& cfg, size_t h, size_t w) {
    if (cfg.has("data_dir")) {
        Dataset ds = load_image_dir(cfg.require("data_dir"));
        if (ds.h() != h || ds.w() != w)
            throw dim_error("dataset dims do not match configured dims");
        return ds;
    }
    auto kinds = cfg.get_str_list("data", {"gradients", "blobs", "stripes"});
    size_t n = cfg.get_size("n", 100);
    uint64_t seed = cfg.get_u64("data_seed", 1);
    Dataset all;
    all.seed = seed;
    for (size_t k = 0; k < kinds.size(); ++k) {
        Dataset part = gen_synthetic_dataset(synth_kind_from_name(kinds[k]), n, h, w,
                                             seed + 1000 * k);
        if (!all.tag.empty()) all.tag += ",";
        all.tag += part.tag;
        for (auto& im : part.images) all.images.push_back(std::move(im));
    }
    return all;
}

std::vector<ImageF> to_float_images(const Dataset& ds) {
    std::vector<ImageF> out;
    out.reserve(ds.images.size());
    for (const auto& im : ds.images) out.push_back(dequantize(im));
    return out;
}

void load_models(const RunConfig& cfg, GeneratorModel& g, DiscriminatorModel& d) {
    load_checkpoint(cfg.require("ckpt"), g, d);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

// ------------------------------------------------------------- subcommands

void cmd_train(const RunConfig& cfg) {
    std::string dir = out_dir(cfg);
    TrainConfig tc;
    tc.h = cfg.get_size("h", 32);
    tc.w = cfg.get_size("w", 32);
    tc.epochs = cfg.get_size("epochs", 20);
    tc.batch = cfg.get_size("batch", 32);
    tc.lr_g = cfg.get_f64("lr_g", 2e-4);
    tc.lr_d = cfg.get_f64("lr_d", 2e-4);
    tc.latent_dim = cfg.get_size("latent", 100);
    tc.hidden_g = cfg.get_size_list("hidden_g", {128});
    tc.hidden_d = cfg.get_size_list("hidden_d", {128});
    tc.seed = cfg.get_u64("model_seed", 1);

    Dataset ds = resolve_dataset(cfg, tc.h, tc.w);
    std::vector<ImageF> data = to_float_images(ds);

    GeneratorModel g;
    DiscriminatorModel d;
    TrainLog log = train_gan(data, tc, g, d);

    std::string ckpt = cfg.get("ckpt", (fs::path(dir) / "model.ckpt").string());
    save_checkpoint(ckpt, g, d);
    write_text((fs::path(dir) / "train_log.csv").string(), log.to_csv());

    std::ostringstream sum;
    sum << config_header(cfg);
    sum << "images=" << ds.images.size() << "\n";
    sum << "dataset=" << ds.tag << "\n";
    sum << "checkpoint=" << ckpt << "\n";
    if (!log.records.empty()) {
        const auto& last = log.records.back();
        sum << "final_g_loss=" << fmt(last.g_loss) << "\n"
            << "final_d_loss=" << fmt(last.d_loss) << "\n"
            << "final_js_proxy=" << fmt(last.js_proxy) << "\n";
    }
    write_text((fs::path(dir) / "summary.txt").string(), sum.str());
}

void cmd_embed(const RunConfig& cfg) {
    std::string dir = out_dir(cfg);
    GeneratorModel g;
    DiscriminatorModel d;
    load_models(cfg, g, d);

    CorruptionMask mask = resolve_mask(cfg, g.h, g.w);
    GrilleKey key = resolve_key(cfg);
    ImageU8 base = resolve_base(cfg, g.h, g.w);
    Message msg = resolve_message(cfg);
    SearchConfig sc = resolve_search(cfg);

    CardanGrille grille = derive_grille(key, mask);
    StegoResult res = generate_stego(g, d, msg, base, mask, key, sc);

    write_pgm((fs::path(dir) / "stego.pgm").string(), res.stego);
    write_text((fs::path(dir) / "trajectory.csv").string(), trajectory_to_csv(res.trajectory));

    std::ostringstream sum;
    sum << config_header(cfg);
    sum << "capacity_bits=" << capacity(grille) << "\n"
        << "message_bits=" << msg.bits.size() << "\n"
        << "iterations_run=" << res.trajectory.size() << "\n"
        << "extraction_accuracy=" << fmt(res.accuracy) << "\n";
    if (!res.trajectory.empty()) {
        double best = res.trajectory.front().total;
        for (const auto& p : res.trajectory) best = std::min(best, p.total);
        sum << "best_total_loss=" << fmt(best) << "\n";
    }
    write_text((fs::path(dir) / "summary.txt").string(), sum.str());
    std::cout << "extraction_accuracy=" << fmt(res.accuracy) << "\n";
}

void cmd_extract(const RunConfig& cfg) {
    std::string dir = out_dir(cfg);
    ImageU8 stego = read_pgm(cfg.require("stego"));
    GrilleKey key = resolve_key(cfg);
    CorruptionMask mask = resolve_mask(cfg, stego.h, stego.w);
    CardanGrille grille = derive_grille(key, mask);

    Message got = extract(stego, grille);
    size_t declared = cfg.get_size("message_len", got.bits.size());
    if (declared > got.bits.size())
        throw capacity_error("message_len " + std::to_string(declared) +
                             " exceeds grille capacity " + std::to_string(got.bits.size()));
    got.bits.resize(declared);
    write_bits((fs::path(dir) / "extracted.bits").string(), got.bits);

    std::ostringstream sum;
    sum << config_header(cfg);
    sum << "bits=" << got.bits.size() << "\n";
    if (cfg.has("truth")) {
        std::vector<uint8_t> truth = read_bits(cfg.require("truth"));
        size_t n = std::min(truth.size(), got.bits.size());
        double acc = extraction_accuracy(
            std::vector<uint8_t>(truth.begin(), truth.begin() + static_cast<long>(n)),
            std::vector<uint8_t>(got.bits.begin(), got.bits.begin() + static_cast<long>(n)));
        sum << "accuracy=" << fmt(acc) << "\n";
        std::cout << "accuracy=" << fmt(acc) << "\n";
    }
    write_text((fs::path(dir) / "summary.txt").string(), sum.str());
    std::cout << "bits=" << got.bits.size() << "\n";
}

void cmd_gen_data(const RunConfig& cfg) {
    std::string dir = out_dir(cfg);
    size_t h = cfg.get_size("h", 32), w = cfg.get_size("w", 32);
    Dataset ds = gen_synthetic_dataset(synth_kind_from_name(cfg.get("kind", "gradients")),
                                       cfg.get_size("n", 16), h, w, cfg.get_u64("seed", 1));
    save_dataset(dir, ds);
    write_text((fs::path(dir) / "summary.txt").string(),
               config_header(cfg) + "images=" + std::to_string(ds.images.size()) + "\n");
}

void cmd_gen_mask(const RunConfig& cfg) {
    std::string dir = out_dir(cfg);
    size_t h = cfg.get_size("h", 32), w = cfg.get_size("w", 32);
    CorruptionMask m =
        gen_corruption_mask(mask_kind_from_name(cfg.get("kind", "random90")), h, w,
                            cfg.get_u64("seed", 1), cfg.get_f64("missing", 0.0));
    write_pgm((fs::path(dir) / "mask.pgm").string(), mask_to_image(m));
    std::ostringstream sum;
    sum << config_header(cfg);
    sum << "known_pixels=" << m.popcount() << "\n"
        << "missing_pixels=" << (m.m.size() - m.popcount()) << "\n";
    write_text((fs::path(dir) / "summary.txt").string(), sum.str());
}

void cmd_js(const RunConfig& cfg) {
    Dataset a = load_image_dir(cfg.require("set_a"));
    Dataset b = load_image_dir(cfg.require("set_b"));
    size_t bins = cfg.get_size("bins", 64);
    JsStatistic stat = js_statistic_from_name(cfg.get("statistic", "image_mean"));
    double eps = cfg.get_f64("epsilon", 0.1);
    double js = estimate_js_images(a.images, b.images, bins, stat);
    std::string report = render_js_report(js, bins, stat, eps);
    std::cout << report;
    if (cfg.has("out"))
        write_text((fs::path(out_dir(cfg)) / "js_report.txt").string(),
                   config_header(cfg) + report);
}

void cmd_capacity(const RunConfig& cfg) {
    double rate = cfg.get_f64("rate", 1.0);
    CapacityReport rep;
    if (cfg.has("absolute_bytes")) {
        rep = capacity_report(cfg.get_f64("absolute_bytes", 0.0), cfg.get_size("h", 64),
                              cfg.get_size("w", 64), cfg.get_size("c", 3), rate);
    } else {
        size_t h = cfg.get_size("h", 32), w = cfg.get_size("w", 32);
        CorruptionMask mask = resolve_mask(cfg, h, w);
        GrilleKey key = resolve_key(cfg);
        CardanGrille grille = derive_grille(key, mask);
        double bytes = static_cast<double>(capacity(grille)) / 8.0;
        rep = capacity_report(bytes, h, w, cfg.get_size("c", 1), rate);
    }
    std::string report = render_capacity_report(rep);
    std::cout << report;
    if (cfg.has("out"))
        write_text((fs::path(out_dir(cfg)) / "capacity_report.txt").string(),
                   config_header(cfg) + report);
}

void cmd_steganalyze(const RunConfig& cfg) {
    std::string dir = out_dir(cfg);
    Dataset covers = load_image_dir(cfg.require("cover_dir"));
    std::vector<ImageU8> stegos;
    if (cfg.has("stego_dir")) {
        Dataset s = load_image_dir(cfg.require("stego_dir"));
        stegos = std::move(s.images);
    } else {
        double payload = cfg.get_f64("lsb_payload", 0.4);
        uint64_t seed = cfg.get_u64("lsb_seed", 1);
        stegos.reserve(covers.images.size());
        for (size_t i = 0; i < covers.images.size(); ++i)
            stegos.push_back(lsb_embed_baseline(covers.images[i], payload, seed + i));
    }

    int t = static_cast<int>(cfg.get_u64("t", 3));
    std::vector<std::vector<double>> cover_feats, stego_feats;
    cover_feats.reserve(covers.images.size());
    stego_feats.reserve(stegos.size());
    for (const auto& im : covers.images) cover_feats.push_back(spam_features(im, t));
    for (const auto& im : stegos) stego_feats.push_back(spam_features(im, t));

    size_t l = cfg.get_size("learners", 51);
    size_t d_sub = cfg.get_size("d_sub", default_subspace_dim(spam_dim(t)));
    size_t splits = cfg.get_size("splits", 10);
    uint64_t split_seed = cfg.get_u64("split_seed", 1);

    std::vector<PeReport> per_split;
    PeReport mean = split_protocol(cover_feats, stego_feats, l, d_sub, split_seed, splits,
                                   &per_split);

    std::ostringstream rep;
    rep << config_header(cfg);
    rep << "spam_dim=" << spam_dim(t) << "\n";
    for (size_t i = 0; i < per_split.size(); ++i)
        rep << "split_" << i << "_p_e=" << fmt(per_split[i].p_e) << "\n";
    rep << "mean_p_fa=" << fmt(mean.p_fa) << "\n"
        << "mean_p_md=" << fmt(mean.p_md) << "\n"
        << "mean_p_e=" << fmt(mean.p_e) << "\n";
    write_text((fs::path(dir) / "pe_report.txt").string(), rep.str());
    std::cout << "mean_p_e=" << fmt(mean.p_e) << "\n";

    if (cfg.get_bool("write_features", false)) {
        std::vector<std::vector<double>> all = cover_feats;
        std::vector<Label> labels(cover_feats.size(), Label::cover);
        for (auto& f : stego_feats) all.push_back(std::move(f));
        labels.insert(labels.end(), stego_feats.size(), Label::stego);
        write_text((fs::path(dir) / "features.csv").string(), features_to_csv(all, labels));
    }
}

void cmd_evaluate(const RunConfig& cfg) {
    std::string dir = out_dir(cfg);
    GeneratorModel g;
    DiscriminatorModel d;
    load_models(cfg, g, d);

    CorruptionMask mask = resolve_mask(cfg, g.h, g.w);
    GrilleKey key = resolve_key(cfg);
    SearchConfig sc = resolve_search(cfg);
    size_t message_bits = cfg.get_size("message_bits", 32);

    std::map<size_t, double> mean_acc_by_bpi;

    if (cfg.get_bool("do_sweep", true)) {
        auto bpi_set = cfg.get_size_list("bpi_set", {1, 4, 8});
        size_t embeds = cfg.get_size("embeds", 50);

        std::ostringstream sweep, snaps;
        sweep << "bpi,embed,accuracy\n";
        snaps << "bpi,embed,iter,accuracy\n";
        sweep.precision(10);
        snaps.precision(10);

        for (size_t bpi : bpi_set) {
            if (bpi < 1 || bpi > 8) throw config_error("bpi_set entries must be in 1..8");
            GrilleKey k = key;
            k.bpi = static_cast<int>(bpi);
            double acc_sum = 0.0;
            for (size_t e = 0; e < embeds; ++e) {
                ImageU8 base = resolve_base(cfg, g.h, g.w, e);
                Message msg = resolve_message(cfg, e);
                if (msg.bits.empty() && message_bits > 0) {
                    Rng rng(cfg.get_u64("message_seed", 1) + e);
                    msg.bits.resize(message_bits);
                    for (auto& b : msg.bits) b = static_cast<uint8_t>(rng.bounded(2));
                }
                SearchConfig sce = sc;
                sce.seed = sc.seed + e;
                StegoResult res = generate_stego(g, d, msg, base, mask, k, sce);
                acc_sum += res.accuracy;
                sweep << bpi << ',' << e << ',' << res.accuracy << '\n';
                for (const auto& p : res.trajectory)
                    if (p.accuracy_snapshot >= 0.0)
                        snaps << bpi << ',' << e << ',' << p.iter << ',' << p.accuracy_snapshot
                              << '\n';
            }
            mean_acc_by_bpi[bpi] = acc_sum / static_cast<double>(embeds);
        }
        write_text((fs::path(dir) / "sweep.csv").string(), sweep.str());
        write_text((fs::path(dir) / "snapshots.csv").string(), snaps.str());

        std::ostringstream ssum;
        ssum << config_header(cfg);
        for (const auto& [bpi, acc] : mean_acc_by_bpi)
            ssum << "mean_accuracy_bpi_" << bpi << "=" << fmt(acc) << "\n";
        write_text((fs::path(dir) / "sweep_summary.txt").string(), ssum.str());
    }

    if (cfg.get_bool("do_steg", true)) {
        size_t n_eval = cfg.get_size("n_eval", 100);
        std::vector<std::vector<double>> cover_feats, stego_feats;
        int t = static_cast<int>(cfg.get_u64("t", 3));
        size_t steg_bpi = cfg.get_size("steg_bpi", 7);
        GrilleKey k = key;
        k.bpi = static_cast<int>(steg_bpi);
        for (size_t e = 0; e < n_eval; ++e) {
            ImageU8 base = resolve_base(cfg, g.h, g.w, 10000 + e);
            SearchConfig sce = sc;
            sce.seed = sc.seed + 10000 + e;
            Message msg = resolve_message(cfg, 10000 + e);
            if (msg.bits.empty() && message_bits > 0) {
                Rng rng(cfg.get_u64("message_seed", 1) + 10000 + e);
                msg.bits.resize(message_bits);
                for (auto& b : msg.bits) b = static_cast<uint8_t>(rng.bounded(2));
            }
            StegoResult with_msg = generate_stego(g, d, msg, base, mask, k, sce);
            StegoResult without = generate_stego(g, d, Message{}, base, mask, k, sce);
            stego_feats.push_back(spam_features(with_msg.stego, t));
            cover_feats.push_back(spam_features(without.stego, t));
        }
        size_t l = cfg.get_size("learners", 51);
        size_t d_sub = cfg.get_size("d_sub", default_subspace_dim(spam_dim(t)));
        size_t splits = cfg.get_size("splits", 10);
        std::vector<PeReport> per_split;
        PeReport mean = split_protocol(cover_feats, stego_feats, l, d_sub,
                                       cfg.get_u64("split_seed", 1), splits, &per_split);
        std::ostringstream rep;
        rep << config_header(cfg);
        for (size_t i = 0; i < per_split.size(); ++i)
            rep << "split_" << i << "_p_e=" << fmt(per_split[i].p_e) << "\n";
        rep << "mean_p_fa=" << fmt(mean.p_fa) << "\n"
            << "mean_p_md=" << fmt(mean.p_md) << "\n"
            << "mean_p_e=" << fmt(mean.p_e) << "\n";
        write_text((fs::path(dir) / "pe_report.txt").string(), rep.str());
    }

    if (cfg.get_bool("do_js", true)) {
        size_t n_js = cfg.get_size("n_js", 200);
        Dataset ds = resolve_dataset(cfg, g.h, g.w);
        std::vector<ImageF> gen = sample_images(g, n_js, cfg.get_u64("sample_seed", 1));
        std::vector<ImageU8> gen_u8;
        gen_u8.reserve(gen.size());
        for (const auto& f : gen) gen_u8.push_back(quantize(f, g.w, g.h));
        size_t bins = cfg.get_size("bins", 64);
        JsStatistic stat = js_statistic_from_name(cfg.get("statistic", "image_mean"));
        double eps = cfg.get_f64("epsilon", 0.1);
        double js = estimate_js_images(gen_u8, ds.images, bins, stat);
        write_text((fs::path(dir) / "js_report.txt").string(),
                   config_header(cfg) + render_js_report(js, bins, stat, eps));
    }

    if (cfg.get_bool("do_capacity", true)) {
        CardanGrille grille = derive_grille(key, mask);
        double bytes = static_cast<double>(capacity(grille)) / 8.0;
        double rate = 1.0;
        if (!mean_acc_by_bpi.empty()) rate = mean_acc_by_bpi.rbegin()->second;
        CapacityReport rep = capacity_report(bytes, g.h, g.w, 1, rate);
        write_text((fs::path(dir) / "capacity_report.txt").string(),
                   config_header(cfg) + render_capacity_report(rep));
    }

    write_text((fs::path(dir) / "summary.txt").string(), config_header(cfg));
}

}  // namespace gss
