#include "critsense/xcli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace critsense {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

struct PlotRow {
    std::string figure;
    std::string series;
    double x;
    double y;
};

std::vector<PlotRow> plot_rows(const ExperimentRecord& r) {
    const std::string Ltag = "_L" + std::to_string(r.L);
    if (r.scenario == "qfi_scaling" && r.observable == "qfi") return {{"qfi_vs_L", r.probe, double(r.L), r.value}};
    if (r.scenario == "theta_curves" && r.L > 0 && r.theta > 0.0)
        return {{"symmetry_theta_curves", r.observable + Ltag, r.theta, r.value}};
    if (r.scenario == "channel_sweep") {
        std::vector<PlotRow> v{{"noisy_qfi_vs_L", r.probe + "_p" + num(r.p), double(r.L), r.value}};
        if (r.reference) v.push_back({"noisy_qfi_vs_L", r.probe + "_p" + num(r.p) + "_reference", double(r.L), *r.reference});
        return v;
    }
    if (r.scenario == "subsystem" && r.observable == "subsystem_parity") {
        const double Ls = r.L_sub;
        return {{"subsystem_parity_rescaled", "Lsub" + std::to_string(r.L_sub), r.theta * std::pow(Ls, 7.0 / 8.0),
                 r.value * std::pow(Ls, 0.25)},
                {"subsystem_delta_theta", "Lsub" + std::to_string(r.L_sub), r.theta,
                 r.delta_theta.value_or(std::nan(""))}};
    }
    if (r.scenario == "subsystem" && (r.observable == "disorder_re" || r.observable == "disorder_im"))
        return {{"rydberg_disorder", r.observable + "_Lsub" + std::to_string(r.L_sub), r.theta, r.value}};
    if (r.scenario == "deformed" && r.observable == "lro_correlator" && r.beta)
        return {{"ladder_lro_vs_beta", "L" + std::to_string(r.L), *r.beta, r.value}};
    if (r.scenario == "deformed" && r.observable == "averaged_qfi") return {{"ladder_qfi_vs_L", "averaged", double(r.L), r.value}};
    if (r.scenario == "deformed" && r.observable == "qfi_pure_chain2")
        return {{"ladder_qfi_vs_L", "pure", double(r.L), r.value}};
    if (r.scenario == "hadamard" && r.observable == "hadamard_cfi")
        return {{"hadamard_cfi_vs_L", "theta" + num(r.theta), double(r.L), r.value}};
    return {};
}

} // namespace

std::string csv_text(const std::vector<ExperimentRecord>& records) {
    std::ostringstream os;
    os << "schema_version,scenario,model,J,h,delta_xxz,channel,p,beta,probe,L,L_sub,theta,observable,value,reference,"
          "variance,delta_theta,qfi,fit_exponent,fit_prefactor,fit_r_squared,seed,config_hash,code_version\n";
    for (const auto& r : records) {
        os << kSchemaVersion << ',' << quoted(r.scenario) << ',' << quoted(r.model) << ',' << num(r.J) << ','
           << num(r.h) << ',' << num(r.delta_xxz) << ',' << quoted(r.channel) << ',' << num(r.p) << ','
           << opt(r.beta) << ',' << quoted(r.probe) << ',' << r.L << ',' << r.L_sub << ',' << num(r.theta) << ','
           << quoted(r.observable) << ',' << num(r.value) << ',' << opt(r.reference) << ',' << opt(r.variance) << ','
           << opt(r.delta_theta) << ',' << opt(r.qfi) << ',' << opt(r.fit_exponent) << ',' << opt(r.fit_prefactor)
           << ',' << opt(r.fit_r_squared) << ',' << r.seed << ',' << r.config_hash << ',' << quoted(r.code_version)
           << '\n';
    }
    return os.str();
}

std::string plotdata_text(const std::vector<ExperimentRecord>& records) {
    std::ostringstream os;
    os << "figure,series,x,y\n";
    for (const auto& r : records)
        for (const auto& p : plot_rows(r))
            os << quoted(p.figure) << ',' << quoted(p.series) << ',' << num(p.x) << ',' << num(p.y) << '\n';
    return os.str();
}

void atomic_write(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("xcli", "atomic_write", "cannot open " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw Error("xcli", "atomic_write", "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("xcli", "atomic_write", "rename failed: " + ec.message());
    }
}

void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
    atomic_write(path, csv_text(records));
}

void emit_plotdata(const std::vector<ExperimentRecord>& records, const std::string& path) {
    atomic_write(path, plotdata_text(records));
}

} // namespace critsense
