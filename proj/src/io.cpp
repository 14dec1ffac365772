#include "lvc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lvc {

void write_curve_csv(std::ostream& out, const BoundaryCurve& curve)
{
    out << "t,vertex_index,x1,x2,rho,jac_det\n";
    const std::string t = format_number(curve.time);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << t << ',' << i << ',' << format_number(curve.vertices[i].x1) << ','
            << format_number(curve.vertices[i].x2) << ','
            << format_number(i < curve.density.size() ? curve.density[i] : 0.0) << ','
            << format_number(i < curve.jacobian_det.size() ? curve.jacobian_det[i] : 0.0) << '\n';
    }
}

void write_control_csv(std::ostream& out, const ControlSignal& signal)
{
    out << 't';
    for (std::size_t i = 0; i < signal.dim(); ++i) out << ",u" << (i + 1);
    out << '\n';
    for (std::size_t j = 0; j < signal.n_steps(); ++j) {
        out << format_number(static_cast<double>(j) * signal.dt());
        for (double v : signal.at(j)) out << ',' << format_number(v);
        out << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const SolverState& state)
{
    out << "iteration,cost,residual,epsilon,needle_measure,wall_time_ms\n";
    const double r0 = state.diagnostics.empty() ? 0.0 : state.diagnostics.front().residual;
    out << "0," << format_number(state.initial_cost) << ',' << format_number(r0) << ",0,0,0\n";
    for (const auto& rec : state.diagnostics) {
        out << rec.iteration << ',' << format_number(rec.cost) << ',' << format_number(rec.residual) << ','
            << format_number(rec.epsilon) << ',' << format_number(rec.needle_measure) << ','
            << format_number(rec.wall_time_ms) << '\n';
    }
}

namespace {

struct Box {
    double lo1, hi1, lo2, hi2;
};

// White to deep blue.
std::string heat_color(double s)
{
    s = std::clamp(s, 0.0, 1.0);
    const auto r = static_cast<int>(std::lround(255.0 * (1.0 - 0.85 * s)));
    const auto g = static_cast<int>(std::lround(255.0 * (1.0 - 0.65 * s)));
    const int b = 255;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

void write_frame_svg(std::ostream& out, const BoundaryCurve& curve, const ProblemInstance& problem)
{
    const auto target = problem.target.sample(256);
    const double reach = 3.0 * problem.density.scale();
    const Vec2 dc = problem.density.center();
    Box box{dc.x1 - reach, dc.x1 + reach, dc.x2 - reach, dc.x2 + reach};
    auto grow = [&](Vec2 p) {
        box.lo1 = std::min(box.lo1, p.x1);
        box.hi1 = std::max(box.hi1, p.x1);
        box.lo2 = std::min(box.lo2, p.x2);
        box.hi2 = std::max(box.hi2, p.x2);
    };
    for (auto p : curve.vertices) grow(p);
    for (auto p : target) grow(p);
    const double pad = 0.05 * std::max(box.hi1 - box.lo1, box.hi2 - box.lo2);
    box = {box.lo1 - pad, box.hi1 + pad, box.lo2 - pad, box.hi2 + pad};

    const double width = 600.0;
    const double scale = width / (box.hi1 - box.lo1);
    const double height = scale * (box.hi2 - box.lo2);
    auto sx = [&](double x1) { return (x1 - box.lo1) * scale; };
    auto sy = [&](double x2) { return (box.hi2 - x2) * scale; };

    char buf[128];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_number(width) << "\" height=\""
        << format_number(height) << "\">\n";

    constexpr int cells = 80;
    const double peak = problem.density(dc);
    const double cw = (box.hi1 - box.lo1) / cells;
    const double ch = (box.hi2 - box.lo2) / cells;
    for (int r = 0; r < cells; ++r) {
        for (int k = 0; k < cells; ++k) {
            const Vec2 x{box.lo1 + (k + 0.5) * cw, box.lo2 + (r + 0.5) * ch};
            const double s = peak > 0.0 ? problem.density(x) / peak : 0.0;
            if (s < 1e-3) continue;
            std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"",
                          sx(box.lo1 + k * cw), sy(box.lo2 + (r + 1) * ch), cw * scale + 0.5, ch * scale + 0.5);
            out << buf << heat_color(s) << "\"/>\n";
        }
    }

    auto polygon = [&](const std::vector<Vec2>& pts, const char* style) {
        out << "<polygon points=\"";
        for (auto p : pts) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(p.x1), sy(p.x2));
            out << buf;
        }
        out << "\" " << style << "/>\n";
    };
    polygon(target, "fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");
    polygon(curve.vertices, "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"");
    out << "<text x=\"8\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">t = "
        << format_number(std::round(curve.time * 1e6) / 1e6) << "</text>\n";
    out << "</svg>\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace lvc
