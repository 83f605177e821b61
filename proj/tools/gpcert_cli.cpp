// Command-line driver: dataset generation, certification, attack runs,
// kernel-parameter sweeps, and the discrete monotonicity scan.
//
// Exit codes: 0 success, 2 configuration/parse error, 3 numeric failure.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpcert/gpcert.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct KernelOptions {
    double theta1 = 1.0;
    double theta2 = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--theta1", theta1, "kernel output scale")->required();
        cmd->add_option("--theta2", theta2, "kernel squared length scale")->required();
    }
    gpcert::KernelSpec spec() const { return gpcert::make_gaussian_kernel(theta1, theta2); }
};

double resolve_jitter(double jitter_flag, const gpcert::KernelSpec& kernel) {
    return jitter_flag < 0.0 ? gpcert::default_jitter(kernel) : jitter_flag;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw gpcert::ConfigError("cannot open '" + path.string() + "' for writing");
    file << text;
}

int run(int argc, char** argv) {
    CLI::App app{"Adversarial-robustness certificates for Gaussian-process binary classifiers"};
    app.require_subcommand(1);

    // gen-blobs
    auto* gen = app.add_subcommand("gen-blobs", "generate a two-blob synthetic dataset");
    int n_per_class = 0, dim = 0;
    double separation = 0.0, spread = 0.0;
    std::uint64_t seed = 0;
    std::string gen_out, gen_format = "csv";
    gen->add_option("--n-per-class", n_per_class)->required();
    gen->add_option("--dim", dim)->required();
    gen->add_option("--separation", separation)->required();
    gen->add_option("--spread", spread)->required();
    gen->add_option("--seed", seed)->default_val("0");
    gen->add_option("--out", gen_out, "output path (.csv or .json manifest)")->required();
    gen->add_option("--format", gen_format)->check(CLI::IsMember({"csv", "binary"}));

    // certify
    auto* certify = app.add_subcommand("certify", "dataset-level certificate as JSON");
    KernelOptions certify_kernel;
    certify_kernel.attach(certify);
    std::string certify_dataset, certify_out;
    double certify_r = -1.0, certify_norm = -1.0, certify_eps = 0.0, certify_jitter = -1.0;
    certify->add_option("--dataset", certify_dataset)->required();
    auto* opt_r = certify->add_option("--r", certify_r, "perturbation as a kernel similarity");
    auto* opt_norm =
        certify->add_option("--norm", certify_norm, "perturbation as a Euclidean norm");
    certify->add_option("--epsilon", certify_eps)->default_val("0");
    certify->add_option("--jitter", certify_jitter, "negative means 1e-10*theta1");
    certify->add_option("--out", certify_out, "output file (default stdout)");
    opt_r->excludes(opt_norm);

    // attack
    auto* attack = app.add_subcommand("attack", "craft one AE per origin and record outcomes");
    KernelOptions attack_kernel;
    attack_kernel.attach(attack);
    std::string attack_dataset, attack_out, attack_plot, attack_origin = "plus";
    double attack_norm = 0.0, attack_eps = 0.0, attack_jitter = -1.0;
    attack->add_option("--dataset", attack_dataset)->required();
    attack->add_option("--norm", attack_norm, "perturbation l2 norm (required, no default)")
        ->required();
    attack->add_option("--epsilon", attack_eps)->default_val("0");
    attack->add_option("--jitter", attack_jitter, "negative means 1e-10*theta1");
    attack->add_option("--origin-class", attack_origin)
        ->check(CLI::IsMember({"plus", "minus", "both"}));
    attack->add_option("--out", attack_out, "records CSV path")->required();
    attack->add_option("--plot", attack_plot, "optional scatter-data CSV path");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "kernel-parameter sweep from a JSON config");
    std::string sweep_config, sweep_out_dir;
    sweep->add_option("--config", sweep_config)->required();
    sweep->add_option("--out-dir", sweep_out_dir)->required();

    // scan-monotone
    auto* scan = app.add_subcommand("scan-monotone",
                                    "check the bound is non-decreasing in the pair similarity");
    KernelOptions scan_kernel;
    scan_kernel.attach(scan);
    double scan_r = 0.0, scan_lo = 0.0, scan_hi = 0.0;
    std::size_t scan_count = 100;
    std::string scan_out;
    scan->add_option("--r", scan_r)->required();
    scan->add_option("--s-min", scan_lo)->required();
    scan->add_option("--s-max", scan_hi)->required();
    scan->add_option("--count", scan_count)->default_val("100");
    scan->add_option("--out", scan_out, "table CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitConfig;
    }

    if (gen->parsed()) {
        const gpcert::LabeledDataset dataset =
            gpcert::generate_blobs(n_per_class, dim, separation, spread, seed);
        if (gen_format == "binary")
            gpcert::save_dataset_binary(dataset, gen_out);
        else
            gpcert::save_dataset_csv(dataset, gen_out);
        std::cout << "wrote " << dataset.size() << " points to " << gen_out << "\n";
        return kExitOk;
    }

    if (certify->parsed()) {
        if (opt_r->count() == 0 && opt_norm->count() == 0)
            throw gpcert::ConfigError("certify needs --r or --norm");
        const gpcert::KernelSpec kernel = certify_kernel.spec();
        const gpcert::LabeledDataset dataset = gpcert::load_dataset(certify_dataset);
        const double r = opt_r->count() > 0
                             ? certify_r
                             : gpcert::kernel_at_distance(kernel, certify_norm);
        const gpcert::DatasetCertificate cert =
            gpcert::dataset_certificate(dataset, r, certify_eps, kernel);
        const double jitter = resolve_jitter(certify_jitter, kernel);
        const std::string text = gpcert::certificate_to_json(cert, kernel, jitter).dump(2) + "\n";
        if (certify_out.empty())
            std::cout << text;
        else
            write_text(certify_out, text);
        return kExitOk;
    }

    if (attack->parsed()) {
        const gpcert::KernelSpec kernel = attack_kernel.spec();
        const gpcert::LabeledDataset dataset = gpcert::load_dataset(attack_dataset);
        gpcert::OriginClass origins = gpcert::OriginClass::plus;
        if (attack_origin == "minus") origins = gpcert::OriginClass::minus;
        if (attack_origin == "both") origins = gpcert::OriginClass::both;
        const std::vector<gpcert::AttackRecord> records =
            gpcert::run_attack_sweep(dataset, kernel, attack_norm, attack_eps,
                                     resolve_jitter(attack_jitter, kernel), origins);
        gpcert::write_records_csv(records, attack_out);
        if (!attack_plot.empty()) gpcert::emit_plot_data(records, attack_plot);
        std::size_t follow = 0, valid = 0;
        for (const auto& rec : records) {
            follow += rec.follows_theorem ? 1 : 0;
            valid += rec.valid ? 1 : 0;
        }
        std::cout << records.size() << " records (" << valid << " valid certificates, "
                  << follow << " follow the bound) -> " << attack_out << "\n";
        return kExitOk;
    }

    if (sweep->parsed()) {
        const gpcert::SweepConfig config = gpcert::load_sweep_config(sweep_config);
        const gpcert::SweepSummary summary = gpcert::run_sweep(config, sweep_out_dir);
        std::cout << gpcert::summary_to_csv(summary);
        return kExitOk;
    }

    if (scan->parsed()) {
        const gpcert::KernelSpec kernel = scan_kernel.spec();
        const gpcert::MonotonicityReport report = gpcert::monotonicity_scan(
            kernel, scan_r, gpcert::linear_grid(scan_lo, scan_hi, scan_count));
        std::ostringstream table;
        table << "s,theta_r2,mu,sigma2,phi_bound\n";
        for (const gpcert::ScanRow& row : report.table)
            table << gpcert::format_double(row.s) << ',' << gpcert::format_double(row.theta_r2)
                  << ',' << gpcert::format_double(row.mu) << ','
                  << gpcert::format_double(row.sigma2) << ','
                  << gpcert::format_double(row.phi_bound) << '\n';
        if (scan_out.empty())
            std::cout << table.str();
        else
            write_text(scan_out, table.str());
        std::cout << (report.passed ? "monotone: yes" : "monotone: no") << "\n";
        return kExitOk;
    }

    return kExitConfig;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const gpcert::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const gpcert::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const gpcert::Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
