#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fourbody/extension.hpp"
#include "fourbody/minimizer.hpp"
#include "fourbody/testpaths.hpp"

namespace fourbody {

struct PathDocument {
    DiscretePath path;
    double action = 0.0;
    FirstVariationResidual residuals;
    double min_pair_distance = 0.0;
    std::vector<RestartTrace> trace;
};

PathDocument make_path_document(const MinimizeResult& result);
std::string write_path_json(const PathDocument& doc);
PathDocument read_path_json(std::string_view text);

std::string write_certificate_json(const CertificateReport& report);
CertificateReport read_certificate_json(std::string_view text);
std::string write_certificate_csv(const CertificateReport& report);

std::string write_trajectory_csv(const ExtendedTrajectory& traj);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace fourbody
