#include "agcm/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <type_traits>

namespace agcm {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string degrees_label(const std::vector<int>& degrees) {
    std::string s = "(";
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(degrees[i]);
    }
    return s + ")";
}

Json vector_to_json(const Vector& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

void require(bool condition, const std::string& what) {
    if (!condition) throw IoError("malformed report JSON: " + what);
}

}  // namespace

Json to_json(const Matrix& A) {
    Json rows = Json::array();
    for (Index i = 0; i < A.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    require(j.is_array(), "matrix must be an array of rows");
    const Index rows = static_cast<Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    require(j[0].is_array(), "matrix rows must be arrays");
    const Index cols = static_cast<Index>(j[0].size());
    Matrix A(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        require(row.is_array() && static_cast<Index>(row.size()) == cols, "ragged matrix rows");
        for (Index c = 0; c < cols; ++c) {
            const Json& cell = row[static_cast<std::size_t>(c)];
            require(cell.is_number(), "matrix entries must be numbers");
            A(i, c) = cell.get<double>();
        }
    }
    return A;
}

Json to_json(const FitResult& fit) {
    Json j;
    j["type"] = "fit";
    j["n"] = fit.mean_hat.rows();
    j["p"] = fit.mean_hat.cols();
    j["n_params"] = fit.n_params;
    j["rmss"] = fit.rmss;
    j["aic"] = fit.aic;
    Json coeffs = Json::array();
    for (const Matrix& theta : fit.coefficients) coeffs.push_back(to_json(theta));
    j["coefficients"] = std::move(coeffs);
    j["mean_hat"] = to_json(fit.mean_hat);
    j["residual"] = to_json(fit.residual);
    j["covariance"] = Json{{"sigma_hat", to_json(fit.covariance.sigma_hat)},
                           {"divisor", fit.covariance.divisor}};
    return j;
}

FitResult fit_from_json(const Json& j) {
    require(j.is_object() && j.value("type", "") == "fit", "expected a fit report");
    require(j.contains("coefficients") && j["coefficients"].is_array(), "missing coefficients");
    require(j.contains("covariance") && j["covariance"].is_object(), "missing covariance");

    Matrix sigma = matrix_from_json(j["covariance"]["sigma_hat"]);
    CovarianceEstimate cov{sigma, j["covariance"]["divisor"].get<Index>(), SpdFactor(sigma)};
    CoefficientSet coefficients;
    for (const Json& theta : j["coefficients"]) coefficients.push_back(matrix_from_json(theta));
    FitResult fit{std::move(coefficients),
                  matrix_from_json(j.at("mean_hat")),
                  matrix_from_json(j.at("residual")),
                  j.at("rmss").get<double>(),
                  j.at("aic").get<double>(),
                  j.at("n_params").get<Index>(),
                  std::move(cov)};
    return fit;
}

Json to_json(const SelectionResult& sel) {
    Json j;
    j["type"] = "selection";
    Json grid = Json::array();
    for (const SelectionCell& cell : sel.grid) {
        Json c;
        c["degrees"] = cell.degrees;
        c["valid"] = cell.valid;
        if (cell.valid) {
            c["aic"] = cell.aic;
            c["rmss"] = cell.rmss;
            c["n_params"] = cell.n_params;
        } else {
            c["error"] = cell.error;
        }
        grid.push_back(std::move(c));
    }
    j["grid"] = std::move(grid);
    j["best"] = sel.best;
    j["ties"] = sel.ties;
    return j;
}

Json to_json(const McReport& mc) {
    Json j;
    j["type"] = "mc_aic";
    j["seed"] = mc.seed;
    j["replications"] = mc.replications;
    if (mc.rho)
        j["rho"] = *mc.rho;
    else
        j["rho"] = nullptr;
    j["shared_min_degree"] = mc.shared_min_degree;
    j["shared_max_degree"] = mc.shared_max_degree;
    j["runtime_seconds"] = mc.runtime_seconds;
    Json points = Json::array();
    for (const McAicPoint& pt : mc.points) {
        Json p;
        p["n"] = pt.n;
        p["aic_shared_min"] = pt.aic_shared_min;
        p["aic_shared_max"] = pt.aic_shared_max;
        p["aic_additive"] = pt.aic_additive;
        p["var_shared_min"] = pt.var_shared_min;
        p["var_shared_max"] = pt.var_shared_max;
        p["var_additive"] = pt.var_additive;
        p["failures"] = pt.failures;
        if (!pt.draws.empty()) {
            Json draws = Json::array();
            for (const auto& d : pt.draws) draws.push_back(Json::array({d[0], d[1], d[2]}));
            p["draws"] = std::move(draws);
        }
        points.push_back(std::move(p));
    }
    j["points"] = std::move(points);
    return j;
}

Json to_json(const std::vector<ConsistencyPoint>& table) {
    Json j;
    j["type"] = "consistency";
    Json points = Json::array();
    for (const ConsistencyPoint& pt : table) {
        Json p;
        p["n"] = pt.n;
        p["sigma_error"] = pt.sigma_error;
        p["coefficient_error"] = pt.coefficient_error;
        p["failures"] = pt.failures;
        points.push_back(std::move(p));
    }
    j["points"] = std::move(points);
    return j;
}

Json to_json(const AsymptoticReport& rep) {
    Json j;
    j["type"] = "asymptotic";
    j["block"] = rep.block;
    j["n"] = rep.n;
    j["replications"] = rep.replications;
    j["failures"] = rep.failures;
    j["row_factor"] = to_json(rep.row_factor);
    j["col_factor"] = to_json(rep.col_factor);
    j["theoretical_covariance"] = to_json(rep.theoretical_covariance);
    j["empirical_covariance"] = to_json(rep.empirical_covariance);
    Json cross = Json::array();
    for (const Matrix& m : rep.cross_block_covariance) cross.push_back(to_json(m));
    j["cross_block_covariance"] = std::move(cross);
    Json cross_se = Json::array();
    for (const Matrix& m : rep.cross_block_stderr) cross_se.push_back(to_json(m));
    j["cross_block_stderr"] = std::move(cross_se);
    j["cross_sigma_covariance"] = to_json(rep.cross_sigma_covariance);
    j["cross_sigma_stderr"] = to_json(rep.cross_sigma_stderr);
    j["phi2"] = to_json(rep.phi2);
    j["marginal_skewness"] = vector_to_json(rep.marginal_skewness);
    j["marginal_excess_kurtosis"] = vector_to_json(rep.marginal_excess_kurtosis);
    j["statistic_mean"] = vector_to_json(rep.statistic_mean);
    j["statistic_variance"] = vector_to_json(rep.statistic_variance);
    j["statistic_skewness"] = vector_to_json(rep.statistic_skewness);
    j["statistic_excess_kurtosis"] = vector_to_json(rep.statistic_excess_kurtosis);
    return j;
}

std::string fit_table(const FitResult& fit, const std::vector<std::string>& block_labels) {
    std::ostringstream out;
    out << "fit summary\n";
    out << "  n        " << fit.mean_hat.rows() << "\n";
    out << "  p        " << fit.mean_hat.cols() << "\n";
    out << "  n_params " << fit.n_params << "\n";
    out << "  rmss     " << g6(fit.rmss) << "\n";
    out << "  aic      " << g6(fit.aic) << "\n";
    for (std::size_t b = 0; b < fit.coefficients.size(); ++b) {
        const std::string label =
            b < block_labels.size() ? block_labels[b] : "block " + std::to_string(b + 1);
        out << "  coefficients [" << label << "]\n";
        const Matrix& theta = fit.coefficients[b];
        for (Index i = 0; i < theta.rows(); ++i) {
            out << "   ";
            for (Index c = 0; c < theta.cols(); ++c) out << " " << std::setw(12) << g6(theta(i, c));
            out << "\n";
        }
    }
    return out.str();
}

std::string selection_table(const SelectionResult& sel) {
    std::ostringstream out;
    out << std::left << std::setw(12) << "degrees" << std::right << std::setw(9) << "n_params"
        << std::setw(14) << "RMSS" << std::setw(14) << "AIC"
        << "\n";
    for (const SelectionCell& cell : sel.grid) {
        out << std::left << std::setw(12) << degrees_label(cell.degrees) << std::right;
        if (cell.valid) {
            std::ostringstream rm, ai;
            rm << std::fixed << std::setprecision(4) << cell.rmss;
            ai << std::fixed << std::setprecision(4) << cell.aic;
            out << std::setw(9) << cell.n_params << std::setw(14) << rm.str() << std::setw(14)
                << ai.str();
            if (!sel.best.empty() && cell.degrees == sel.best) out << " *";
        } else {
            out << "  excluded: " << cell.error;
        }
        out << "\n";
    }
    if (sel.best.empty()) {
        out << "no candidate model could be fitted\n";
    } else {
        out << "best " << degrees_label(sel.best);
        if (!sel.ties.empty()) {
            out << "  (ties:";
            for (const auto& t : sel.ties) out << " " << degrees_label(t);
            out << ")";
        }
        out << "\n";
    }
    return out.str();
}

std::string mc_table(const McReport& mc) {
    std::ostringstream out;
    out << "averaged AIC, N = " << mc.replications << ", seed = " << mc.seed;
    if (mc.rho) out << ", rho = " << g6(*mc.rho);
    out << "\n";
    out << std::right << std::setw(6) << "n" << std::setw(16)
        << ("shared(" + std::to_string(mc.shared_min_degree) + ")") << std::setw(16)
        << ("shared(" + std::to_string(mc.shared_max_degree) + ")") << std::setw(16) << "additive"
        << std::setw(10) << "failures"
        << "\n";
    for (const McAicPoint& pt : mc.points) {
        out << std::setw(6) << pt.n << std::setw(16) << std::fixed << std::setprecision(4)
            << pt.aic_shared_min << std::setw(16) << pt.aic_shared_max << std::setw(16)
            << pt.aic_additive << std::setw(10) << pt.failures << "\n";
        out.unsetf(std::ios::fixed);
    }
    return out.str();
}

std::string consistency_table(const std::vector<ConsistencyPoint>& table) {
    std::ostringstream out;
    out << std::right << std::setw(6) << "n" << std::setw(16) << "sigma_error";
    const std::size_t k = table.empty() ? 0 : table.front().coefficient_error.size();
    for (std::size_t j = 0; j < k; ++j)
        out << std::setw(16) << ("theta_error_" + std::to_string(j + 1));
    out << std::setw(10) << "failures"
        << "\n";
    for (const ConsistencyPoint& pt : table) {
        out << std::setw(6) << pt.n << std::setw(16) << std::fixed << std::setprecision(6)
            << pt.sigma_error;
        for (double e : pt.coefficient_error) out << std::setw(16) << e;
        out.unsetf(std::ios::fixed);
        out << std::setw(10) << pt.failures << "\n";
    }
    return out.str();
}

std::string asymptotic_summary(const AsymptoticReport& rep) {
    std::ostringstream out;
    out << "limiting-distribution check, block " << (rep.block + 1) << ", n = " << rep.n
        << ", N = " << rep.replications << ", failures = " << rep.failures << "\n";
    const double scale = rep.theoretical_covariance.cwiseAbs().maxCoeff();
    const double err =
        (rep.empirical_covariance - rep.theoretical_covariance).cwiseAbs().maxCoeff();
    out << "  covariance max |empirical - theoretical|: " << g6(err) << "  (relative "
        << g6(err / scale) << ")\n";
    double worst_cross = 0.0;
    for (std::size_t j = 0; j < rep.cross_block_covariance.size(); ++j) {
        const Matrix& c = rep.cross_block_covariance[j];
        if (c.size() == 0) continue;
        worst_cross = std::max(
            worst_cross, (c.cwiseQuotient(rep.cross_block_stderr[j])).cwiseAbs().maxCoeff());
    }
    out << "  worst cross-block |covariance| / stderr: " << g6(worst_cross) << "\n";
    out << "  worst theta-sigma |covariance| / stderr: "
        << g6(rep.cross_sigma_covariance.cwiseQuotient(rep.cross_sigma_stderr)
                  .cwiseAbs()
                  .maxCoeff())
        << "\n";
    out << "  statistic mean in ["
        << g6(rep.statistic_mean.minCoeff()) << ", " << g6(rep.statistic_mean.maxCoeff())
        << "], variance in [" << g6(rep.statistic_variance.minCoeff()) << ", "
        << g6(rep.statistic_variance.maxCoeff()) << "]\n";
    out << "  marginal |skewness| max: " << g6(rep.marginal_skewness.cwiseAbs().maxCoeff())
        << ", |excess kurtosis| max: " << g6(rep.marginal_excess_kurtosis.cwiseAbs().maxCoeff())
        << "\n";
    return out.str();
}

std::string mc_csv(const McReport& mc) {
    std::ostringstream out;
    out << "n,aic_shared_min,aic_shared_max,aic_additive,var_shared_min,var_shared_max,"
           "var_additive,failures\n";
    for (const McAicPoint& pt : mc.points) {
        out << pt.n << "," << g17(pt.aic_shared_min) << "," << g17(pt.aic_shared_max) << ","
            << g17(pt.aic_additive) << "," << g17(pt.var_shared_min) << ","
            << g17(pt.var_shared_max) << "," << g17(pt.var_additive) << "," << pt.failures << "\n";
    }
    return out.str();
}

namespace {

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> values;
};

}  // namespace

std::string mc_svg(const McReport& mc) {
    if (mc.points.empty()) throw ValidationError("cannot chart an empty report");
    const double width = 720, height = 460;
    const double left = 70, right = width - 190, top = 52, bottom = height - 60;

    std::vector<double> xs;
    for (const McAicPoint& pt : mc.points) xs.push_back(pt.n);
    std::vector<SvgSeries> series = {
        {"shared degree " + std::to_string(mc.shared_min_degree), "#d62728", {}},
        {"shared degree " + std::to_string(mc.shared_max_degree), "#1f77b4", {}},
        {"additive (true)", "#2ca02c", {}},
    };
    for (const McAicPoint& pt : mc.points) {
        series[0].values.push_back(pt.aic_shared_min);
        series[1].values.push_back(pt.aic_shared_max);
        series[2].values.push_back(pt.aic_additive);
    }

    double xmin = xs.front(), xmax = xs.front();
    for (double x : xs) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    if (xmax == xmin) {
        xmin -= 1;
        xmax += 1;
    }
    double ymin = series[0].values[0], ymax = ymin;
    for (const SvgSeries& s : series)
        for (double v : s.values) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    const double pad = ymax > ymin ? 0.06 * (ymax - ymin) : 1.0;
    ymin -= pad;
    ymax += pad;

    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
    auto py = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "  <text x=\"" << (left + (right - left) / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">Averaged AIC vs sample size";
    if (mc.rho) svg << " (rho = " << g6(*mc.rho) << ", N = " << mc.replications << ")";
    svg << "</text>\n";

    // axes
    svg << "  <line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    for (double x : xs) {
        svg << "  <line x1=\"" << px(x) << "\" y1=\"" << bottom << "\" x2=\"" << px(x)
            << "\" y2=\"" << (bottom + 5) << "\" stroke=\"black\"/>\n";
        svg << "  <text x=\"" << px(x) << "\" y=\"" << (bottom + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << g6(x)
            << "</text>\n";
    }
    for (int tick = 0; tick <= 5; ++tick) {
        const double y = ymin + tick * (ymax - ymin) / 5.0;
        svg << "  <line x1=\"" << (left - 5) << "\" y1=\"" << py(y) << "\" x2=\"" << left
            << "\" y2=\"" << py(y) << "\" stroke=\"black\"/>\n";
        svg << "  <line x1=\"" << left << "\" y1=\"" << py(y) << "\" x2=\"" << right << "\" y2=\""
            << py(y) << "\" stroke=\"#dddddd\"/>\n";
        svg << "  <text x=\"" << (left - 9) << "\" y=\"" << (py(y) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << g6(y) << "</text>\n";
    }
    svg << "  <text x=\"" << (left + (right - left) / 2) << "\" y=\"" << (height - 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">n</text>\n";
    svg << "  <text x=\"20\" y=\"" << (top + (bottom - top) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 20 "
        << (top + (bottom - top) / 2) << ")\">averaged AIC</text>\n";

    for (const SvgSeries& s : series) {
        svg << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) svg << " ";
            svg << px(xs[i]) << "," << py(s.values[i]);
        }
        svg << "\"/>\n";
        for (std::size_t i = 0; i < xs.size(); ++i)
            svg << "  <circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(s.values[i])
                << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }

    // legend
    double ly = top + 10;
    for (const SvgSeries& s : series) {
        svg << "  <line x1=\"" << (right + 14) << "\" y1=\"" << ly << "\" x2=\"" << (right + 40)
            << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        svg << "  <text x=\"" << (right + 46) << "\" y=\"" << (ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        ly += 22;
    }
    svg << "</svg>\n";
    return svg.str();
}

namespace {

std::string extension(ReportFormat f) {
    switch (f) {
        case ReportFormat::kJson: return ".json";
        case ReportFormat::kText: return ".txt";
        case ReportFormat::kCsv: return ".csv";
        case ReportFormat::kSvg: return ".svg";
    }
    return "";
}

std::filesystem::path write_file(const std::filesystem::path& out_base, ReportFormat format,
                                 const std::string& content) {
    std::filesystem::path path = out_base;
    path += extension(format);
    std::error_code ec;
    const std::filesystem::path parent = path.parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent, ec);
        if (ec) throw IoError("cannot create directory \"" + parent.string() + "\": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open \"" + path.string() + "\" for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing \"" + path.string() + "\"");
    return path;
}

template <typename Result>
std::vector<std::filesystem::path> emit(const Result& result, const std::filesystem::path& out_base,
                                        const std::set<ReportFormat>& formats,
                                        const std::string& kind, bool chartable,
                                        const std::vector<std::string>& block_labels = {}) {
    if (formats.empty()) throw ValidationError("no output formats requested");
    std::vector<std::filesystem::path> written;
    for (ReportFormat f : formats) {
        std::string content;
        if (f == ReportFormat::kJson) {
            content = to_json(result).dump(2);
            content += "\n";
        } else if (f == ReportFormat::kText) {
            if constexpr (std::is_same_v<Result, FitResult>)
                content = fit_table(result, block_labels);
            else if constexpr (std::is_same_v<Result, SelectionResult>)
                content = selection_table(result);
            else if constexpr (std::is_same_v<Result, McReport>)
                content = mc_table(result);
            else if constexpr (std::is_same_v<Result, std::vector<ConsistencyPoint>>)
                content = consistency_table(result);
            else
                content = asymptotic_summary(result);
        } else if (chartable) {
            if constexpr (std::is_same_v<Result, McReport>)
                content = f == ReportFormat::kCsv ? mc_csv(result) : mc_svg(result);
        } else {
            throw ValidationError("format " + extension(f).substr(1) + " is not available for " +
                                  kind + " reports");
        }
        written.push_back(write_file(out_base, f, content));
    }
    return written;
}

}  // namespace

std::set<ReportFormat> parse_formats(const std::string& list) {
    std::set<ReportFormat> formats;
    std::string token;
    std::istringstream in(list);
    while (std::getline(in, token, ',')) {
        if (token == "json")
            formats.insert(ReportFormat::kJson);
        else if (token == "text")
            formats.insert(ReportFormat::kText);
        else if (token == "csv")
            formats.insert(ReportFormat::kCsv);
        else if (token == "svg")
            formats.insert(ReportFormat::kSvg);
        else
            throw ValidationError("unknown format \"" + token +
                                  "\" (expected json, text, csv or svg)");
    }
    if (formats.empty()) throw ValidationError("no output formats requested");
    return formats;
}

std::vector<std::filesystem::path> emit_report(const FitResult& fit,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats,
                                               const std::vector<std::string>& block_labels) {
    return emit(fit, out_base, formats, "fit", false, block_labels);
}

std::vector<std::filesystem::path> emit_report(const SelectionResult& sel,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats) {
    return emit(sel, out_base, formats, "selection", false);
}

std::vector<std::filesystem::path> emit_report(const McReport& mc,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats) {
    return emit(mc, out_base, formats, "mc-aic", true);
}

std::vector<std::filesystem::path> emit_report(const std::vector<ConsistencyPoint>& table,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats) {
    return emit(table, out_base, formats, "consistency", false);
}

std::vector<std::filesystem::path> emit_report(const AsymptoticReport& rep,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats) {
    return emit(rep, out_base, formats, "asymptotic", false);
}

}  // namespace agcm
