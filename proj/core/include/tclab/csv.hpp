#pragma once

#include <string>
#include <vector>

#include "tclab/coefficients.hpp"
#include "tclab/fokkerplanck.hpp"
#include "tclab/generators.hpp"
#include "tclab/rcll_path.hpp"
#include "tclab/timechange.hpp"

namespace tclab {

// All CSV output is RFC-4180-style: header row, '.' decimal separator,
// 17 significant digits (round-trip exact for doubles).
std::string format_double(double v);
std::string csv_quote(const std::string& field);

void write_path_csv(const RcllPath& path, const std::string& file);
void write_timechange_csv(const TimeChange& tc, const std::string& file);
void write_ensemble_csv(const MarginalEnsemble& ens, const std::string& file);
MarginalEnsemble read_ensemble_csv(const std::string& file);

void write_fp_csv(const FpReport& report, const std::string& file);
void write_ks_csv(const KsReport& report, const std::string& file);

struct MartingaleRow {
    std::string kind;  // homogeneous | inhomogeneous
    std::string function;
    double t;
    double mean;
    double standard_error;
    bool pass;
};
void write_martingale_csv(const std::vector<MartingaleRow>& rows, const std::string& file);

struct SpacetimeRow {
    double s0;
    std::string function;
    double t;
    double mean;
    double standard_error;
    bool pass;
};
void write_spacetime_csv(const std::vector<SpacetimeRow>& rows, const std::string& file);

struct ClassificationRow {
    double z;
    std::string route;  // declared | quadrature
    std::string verdict;
    std::string evidence;
};
void write_classification_csv(const std::vector<ClassificationRow>& rows, const std::string& file);

struct RegularityRow {
    std::size_t path_id;
    std::optional<double> rho0;
    std::optional<double> rho;
    bool consistent;
};
void write_regularity_csv(const std::vector<RegularityRow>& rows, const std::string& file);

struct PathwiseRow {
    std::size_t path_id;
    double residual;
    double residual_refined;
    bool frozen;
    bool pass;
};
void write_pathwise_csv(const std::vector<PathwiseRow>& rows, const std::string& file);

}  // namespace tclab
