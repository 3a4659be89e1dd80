// Small utilities: dataset generation, kernel tables, feature bank dumps.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rrf/dataset.hpp"
#include "rrf/features.hpp"
#include "rrf/kernels.hpp"

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rrf utilities"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset as CSV plus a manifest");
    std::string generator = "grid2d", kind = "sine", data_out, manifest_out;
    int m = 2000, d = 2;
    std::uint64_t seed = 0;
    gen->add_option("--generator", generator)->check(CLI::IsMember({"grid2d", "daniely"}));
    gen->add_option("--kind", kind, "grid2d pattern: sine, strips, square, checkboard");
    gen->add_option("-m,--samples", m)->check(CLI::PositiveNumber);
    gen->add_option("-d,--dim", d, "daniely dimension")->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed);
    gen->add_option("--out", data_out)->required();
    gen->add_option("--manifest", manifest_out);

    auto* taylor = app.add_subcommand("taylor", "arc-cosine kernel Taylor coefficients as CSV");
    int taylor_d = 1, terms = 20;
    std::string taylor_out;
    taylor->add_option("-d,--dim", taylor_d)->check(CLI::PositiveNumber);
    taylor->add_option("--terms", terms)->check(CLI::NonNegativeNumber);
    taylor->add_option("--out", taylor_out)->required();

    auto* bank = app.add_subcommand("bank", "sample a feature bank and dump it");
    std::string bank_kind = "relu", bank_out;
    int bank_d = 2, bank_n = 100;
    double gamma = 1.0;
    std::uint64_t bank_seed = 0;
    bank->add_option("--kind", bank_kind)->check(CLI::IsMember({"relu", "fourier"}));
    bank->add_option("-d,--dim", bank_d)->check(CLI::PositiveNumber);
    bank->add_option("-n,--count", bank_n)->check(CLI::PositiveNumber);
    bank->add_option("--bandwidth", gamma);
    bank->add_option("--seed", bank_seed);
    bank->add_option("--out", bank_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const rrf::Dataset data = generator == "grid2d"
                                          ? rrf::gen_grid2d(rrf::grid2d_kind_from_string(kind), m, seed)
                                          : rrf::gen_daniely(d, m, seed);
            auto out = open_out(data_out);
            rrf::write_csv(data, out);
            if (!manifest_out.empty()) open_out(manifest_out) << rrf::manifest_json(data, seed) << '\n';
        } else if (*taylor) {
            auto out = open_out(taylor_out);
            rrf::write_taylor_csv(rrf::taylor_coeffs(taylor_d, terms), out);
        } else if (*bank) {
            rrf::FeatureSpec spec;
            spec.kind = rrf::feature_kind_from_string(bank_kind);
            spec.input_dim = bank_d;
            spec.count = bank_n;
            spec.bandwidth = gamma;
            spec.seed = bank_seed;
            if (spec.kind == rrf::FeatureKind::fourier) spec.distribution = rrf::Gaussian{1.0};
            auto out = open_out(bank_out);
            rrf::write_bank(rrf::FeatureBank::sample(spec), out);
        }
    } catch (const std::exception& e) {
        std::cerr << "rrf_tool: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
