// eitmem: EIT light-storage simulator front end.
//
//   eitmem check    --config configs/rb85_storage.json
//   eitmem spectrum --config configs/rb85_storage.json --omega 0,1.5 --out spectra/
//   eitmem simulate --config configs/rb85_storage.json --larmor-period-us 4 --out run/
//   eitmem revival  --config configs/rb85_storage.json --theta 0:1.5707963:33 --out revival/

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eitmem/cli.hpp"

namespace {

struct FieldOverrides {
    std::optional<double> b_gauss;
    std::optional<double> larmor_period_us;

    void add(CLI::App* cmd) {
        auto* b = cmd->add_option("--b-gauss", b_gauss, "Magnetic field magnitude in gauss");
        auto* t = cmd->add_option("--larmor-period-us", larmor_period_us, "Magnetic field given as Larmor period (us)");
        b->excludes(t);
    }
    void apply(eitmem::Experiment& ex) const {
        if (b_gauss) ex.bfield = eitmem::MagneticField::from_gauss(*b_gauss, ex.bfield.theta);
        if (larmor_period_us)
            ex.bfield = eitmem::MagneticField::from_larmor_period(*larmor_period_us * eitmem::constants::us,
                                                                  ex.scheme.g_g, ex.bfield.theta);
    }
};

}  // namespace

int main(int argc, char** argv) {
    using namespace eitmem;
    CLI::App app{"Light storage and retrieval in a degenerate EIT medium"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";

    auto* check = app.add_subcommand("check", "Feasibility report and derived constants");
    check->add_option("--config", config_path, "Experiment JSON")->required();
    FieldOverrides check_field;
    check_field.add(check);

    auto* spectrum = app.add_subcommand("spectrum", "Susceptibility and transmittance scans");
    spectrum->add_option("--config", config_path, "Experiment JSON")->required();
    spectrum->add_option("--out", out_dir, "Output directory");
    std::string omega_list;
    double delta_max = 5.0;
    int points = 1001;
    spectrum->add_option("--omega", omega_list, "Control Rabi frequencies in units of Gamma_e (list or start:stop:n)");
    spectrum->add_option("--delta-max", delta_max, "Scan half-width in units of Gamma_e");
    spectrum->add_option("--points", points, "Detuning points per scan");

    auto* simulate = app.add_subcommand("simulate", "Store-and-retrieve time-domain simulation");
    simulate->add_option("--config", config_path, "Experiment JSON")->required();
    simulate->add_option("--out", out_dir, "Output directory");
    FieldOverrides sim_field;
    sim_field.add(simulate);
    std::optional<double> storage_us, grid_dt_ns;
    std::optional<int> grid_nz;
    simulate->add_option("--storage-us", storage_us, "Storage time between control off and on (us)");
    simulate->add_option("--grid-nz", grid_nz, "Number of z grid points");
    simulate->add_option("--grid-dt-ns", grid_dt_ns, "Time step (ns)");

    auto* revival = app.add_subcommand("revival", "Analytic retrieval efficiency over one Larmor period");
    revival->add_option("--config", config_path, "Experiment JSON")->required();
    revival->add_option("--out", out_dir, "Output directory");
    FieldOverrides rev_field;
    rev_field.add(revival);
    std::string theta_spec = "0:1.5707963267948966:33";
    int t_points = 257;
    revival->add_option("--theta", theta_spec, "Field angles in rad (list or start:stop:n)");
    revival->add_option("--t-points", t_points, "Storage-time points over one Larmor period");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kConfigError;
    }

    try {
        Experiment ex = load_experiment(config_path);
        if (*check) {
            check_field.apply(ex);
            return cli::cmd_check(ex, std::cout);
        }
        if (*spectrum) {
            std::vector<double> omegas{ex.control.Omega_on / ex.scheme.Gamma_e};
            if (!omega_list.empty()) omegas = cli::parse_list_or_range(omega_list);
            for (const auto& p : cli::cmd_spectrum(ex, omegas, delta_max, points, out_dir)) std::cout << p.string() << '\n';
            return cli::kOk;
        }
        if (*simulate) {
            sim_field.apply(ex);
            if (storage_us) ex.control.t_on = ex.control.t_off + *storage_us * constants::us;
            if (grid_nz) ex.grid.nz = *grid_nz;
            if (grid_dt_ns) ex.grid.dt = *grid_dt_ns * constants::ns;
            const auto rec = cli::cmd_simulate(ex, out_dir);
            std::cout << "efficiency: " << cli::fmt(rec.efficiency) << '\n';
            std::cout << "E_in: " << cli::fmt(rec.E_in) << "  E_leaked: " << cli::fmt(rec.E_leaked)
                      << "  E_retrieved: " << cli::fmt(rec.E_retrieved) << '\n';
            return cli::kOk;
        }
        if (*revival) {
            rev_field.apply(ex);
            std::cout << cli::cmd_revival(ex, cli::parse_list_or_range(theta_spec), t_points, out_dir).string() << '\n';
            return cli::kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kConfigError;
    } catch (const NumericalInstability& e) {
        std::cerr << "numerical instability: " << e.what() << '\n';
        return cli::kNumericalInstability;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return cli::kOk;
}
