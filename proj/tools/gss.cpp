#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gss/error.hpp"
#include "gss/pipeline.hpp"

namespace {

struct SubArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generative steganography by sampling: train, embed, extract, evaluate"};
    app.require_subcommand(1);

    const std::map<std::string, std::pair<std::string, void (*)(const gss::RunConfig&)>> cmds = {
        {"train", {"train the generator/discriminator pair", gss::cmd_train}},
        {"embed", {"hide a message by constrained latent search", gss::cmd_embed}},
        {"extract", {"read message bits from a stego image with the key", gss::cmd_extract}},
        {"evaluate", {"run accuracy sweeps, steganalysis, JS and capacity reports",
                      gss::cmd_evaluate}},
        {"gen-data", {"generate a synthetic image corpus", gss::cmd_gen_data}},
        {"gen-mask", {"generate a corruption mask", gss::cmd_gen_mask}},
        {"js", {"JS divergence estimate between two image directories", gss::cmd_js}},
        {"capacity", {"capacity report (absolute/relative/actual)", gss::cmd_capacity}},
        {"steganalyze", {"SPAM + ensemble steganalysis of cover vs stego sets",
                         gss::cmd_steganalyze}},
    };

    std::map<std::string, SubArgs> args;
    for (const auto& [name, entry] : cmds) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        SubArgs& a = args[name];
        sub->add_option("--config", a.config_path, "key=value config file");
        sub->add_option("--set,-s", a.sets, "override a config key (key=value, repeatable)");
        sub->add_option("--out,-o", a.out, "output directory (same as --set out=DIR)");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    const SubArgs& a = args.at(name);
    try {
        gss::RunConfig cfg;
        if (!a.config_path.empty()) cfg = gss::RunConfig::from_file(a.config_path);
        for (const auto& pair : a.sets) cfg.set_pair(pair);
        if (!a.out.empty()) cfg.set("out", a.out);
        cmds.at(name).second(cfg);
    } catch (const gss::Error& e) {
        std::cerr << "error: " << e.tag() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal_error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
