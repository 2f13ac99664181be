#include "tclab/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "tclab/errors.hpp"

namespace tclab {

namespace {

std::ofstream open_out(const std::string& file) {
    std::ofstream out(file, std::ios::binary);  // binary: no platform newline translation
    if (!out) throw ConfigError("cannot open " + file + " for writing");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("bad numeric field '" + s + "' in " + where);
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

void write_path_csv(const RcllPath& path, const std::string& file) {
    auto out = open_out(file);
    out << "t,value\n";
    for (std::size_t i = 0; i < path.size(); ++i)
        out << format_double(path.breakpoints()[i]) << ',' << format_double(path.values()[i]) << '\n';
}

void write_timechange_csv(const TimeChange& tc, const std::string& file) {
    auto out = open_out(file);
    out << "t,tau,frozen\n";
    for (std::size_t k = 0; k < tc.tgrid.size(); ++k) {
        const bool frozen = tc.frozen_from && k >= *tc.frozen_from;
        out << format_double(tc.tgrid[k]) << ',' << format_double(tc.tau[k]) << ','
            << (frozen ? "1" : "0") << '\n';
    }
}

void write_ensemble_csv(const MarginalEnsemble& ens, const std::string& file) {
    auto out = open_out(file);
    out << "path_id,t,value\n";
    for (std::size_t i = 0; i < ens.n_paths; ++i) {
        for (std::size_t k = 0; k < ens.tgrid.size(); ++k) {
            out << i << ',' << format_double(ens.tgrid[k]) << ',' << format_double(ens.at(i, k))
                << '\n';
        }
    }
}

MarginalEnsemble read_ensemble_csv(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + file);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty ensemble file " + file);
    const auto header = split_csv_line(line);
    if (header.size() != 3 || header[0] != "path_id" || header[1] != "t" || header[2] != "value")
        throw ConfigError("unexpected ensemble header in " + file);

    MarginalEnsemble ens;
    ens.provenance = Provenance::External;
    std::vector<double> tgrid;
    std::vector<double> samples;
    std::uint64_t current_path = 0;
    std::size_t col = 0;
    bool first_path_done = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) throw ConfigError("bad row at line " + std::to_string(line_no));
        const auto path_id = static_cast<std::uint64_t>(parse_double(fields[0], file));
        const double t = parse_double(fields[1], file);
        const double v = parse_double(fields[2], file);
        if (path_id != current_path) {
            if (path_id != current_path + 1)
                throw ConfigError("non-contiguous path ids at line " + std::to_string(line_no));
            first_path_done = true;
            if (col != tgrid.size()) throw ConfigError("ragged ensemble at line " + std::to_string(line_no));
            current_path = path_id;
            col = 0;
        }
        if (!first_path_done) {
            tgrid.push_back(t);
        } else {
            if (col >= tgrid.size() || std::fabs(tgrid[col] - t) > 1e-12)
                throw ConfigError("grid mismatch at line " + std::to_string(line_no));
        }
        samples.push_back(v);
        ++col;
    }
    if (tgrid.empty()) throw ConfigError("no rows in " + file);
    if (col != tgrid.size()) throw ConfigError("ragged final path in " + file);
    ens.tgrid = std::move(tgrid);
    ens.samples = std::move(samples);
    ens.n_paths = ens.samples.size() / ens.tgrid.size();
    ens.frozen_from.assign(ens.n_paths, -1);
    return ens;
}

void write_fp_csv(const FpReport& report, const std::string& file) {
    auto out = open_out(file);
    out << "function,t,lhs,rhs,residual,mc_standard_error,quadrature_bound,pass\n";
    for (const auto& c : report.cells) {
        out << csv_quote(c.function) << ',' << format_double(c.t) << ',' << format_double(c.lhs)
            << ',' << format_double(c.rhs) << ',' << format_double(c.residual) << ','
            << format_double(c.mc_standard_error) << ',' << format_double(c.quadrature_bound) << ','
            << (c.pass ? "1" : "0") << '\n';
    }
}

void write_ks_csv(const KsReport& report, const std::string& file) {
    auto out = open_out(file);
    out << "t,ks_statistic,threshold,pass\n";
    for (const auto& c : report.cells) {
        out << format_double(c.t) << ',' << format_double(c.ks_statistic) << ','
            << format_double(c.threshold) << ',' << (c.pass ? "1" : "0") << '\n';
    }
}

void write_martingale_csv(const std::vector<MartingaleRow>& rows, const std::string& file) {
    auto out = open_out(file);
    out << "kind,function,t,mean,standard_error,pass\n";
    for (const auto& r : rows) {
        out << r.kind << ',' << csv_quote(r.function) << ',' << format_double(r.t) << ','
            << format_double(r.mean) << ',' << format_double(r.standard_error) << ','
            << (r.pass ? "1" : "0") << '\n';
    }
}

void write_spacetime_csv(const std::vector<SpacetimeRow>& rows, const std::string& file) {
    auto out = open_out(file);
    out << "s0,function,t,mean,standard_error,pass\n";
    for (const auto& r : rows) {
        out << format_double(r.s0) << ',' << csv_quote(r.function) << ',' << format_double(r.t)
            << ',' << format_double(r.mean) << ',' << format_double(r.standard_error) << ','
            << (r.pass ? "1" : "0") << '\n';
    }
}

void write_classification_csv(const std::vector<ClassificationRow>& rows, const std::string& file) {
    auto out = open_out(file);
    out << "z,route,verdict,evidence\n";
    for (const auto& r : rows) {
        out << format_double(r.z) << ',' << r.route << ',' << r.verdict << ','
            << csv_quote(r.evidence) << '\n';
    }
}

void write_regularity_csv(const std::vector<RegularityRow>& rows, const std::string& file) {
    auto out = open_out(file);
    out << "path_id,rho0,rho,consistent\n";
    for (const auto& r : rows) {
        out << r.path_id << ',' << (r.rho0 ? format_double(*r.rho0) : "") << ','
            << (r.rho ? format_double(*r.rho) : "") << ',' << (r.consistent ? "1" : "0") << '\n';
    }
}

void write_pathwise_csv(const std::vector<PathwiseRow>& rows, const std::string& file) {
    auto out = open_out(file);
    out << "path_id,residual,residual_refined,frozen,pass\n";
    for (const auto& r : rows) {
        out << r.path_id << ',' << format_double(r.residual) << ','
            << format_double(r.residual_refined) << ',' << (r.frozen ? "1" : "0") << ','
            << (r.pass ? "1" : "0") << '\n';
    }
}

}  // namespace tclab
