#include "elemvae/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace elemvae::io {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string meta_comment(std::uint64_t seed, const std::string& config_hash) {
  return "# elemvae " + std::string(kToolVersion) + "\n# seed=" + std::to_string(seed) +
         " config=" + config_hash + "\n";
}

CsvWriter::CsvWriter(const std::string& path, std::uint64_t seed, const std::string& config_hash)
    : out_(path) {
  if (!out_) throw std::runtime_error("cannot write: " + path);
  out_ << meta_comment(seed, config_hash);
}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

namespace {

const char* kPalette[] = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#2f4b7c", "#a05195",
};
constexpr int kPaletteSize = 12;

std::string ramp_color(double t) {
  // blue -> yellow -> red
  t = std::clamp(t, 0.0, 1.0);
  double r, g, b;
  if (t < 0.5) {
    double u = t * 2.0;
    r = 40 + u * (240 - 40);
    g = 80 + u * (220 - 80);
    b = 200 - u * 160;
  } else {
    double u = (t - 0.5) * 2.0;
    r = 240;
    g = 220 - u * 170;
    b = 40;
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(r), static_cast<int>(g),
                static_cast<int>(b));
  return buf;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_scatter_svg(const std::string& path, const std::vector<ScatterPoint>& points,
                       const ScatterOptions& options, std::uint64_t seed,
                       const std::string& config_hash) {
  if (points.empty()) throw std::invalid_argument("write_scatter_svg: no points");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);

  double xmin = points[0].x, xmax = points[0].x, ymin = points[0].y, ymax = points[0].y;
  for (const ScatterPoint& p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  double xspan = xmax - xmin, yspan = ymax - ymin;
  if (xspan <= 0) xspan = 1;
  if (yspan <= 0) yspan = 1;
  xmin -= 0.05 * xspan; xmax += 0.05 * xspan;
  ymin -= 0.05 * yspan; ymax += 0.05 * yspan;

  const int margin = 44, legend_w = 130;
  int plot_w = options.width - 2 * margin - legend_w;
  int plot_h = options.height - 2 * margin;
  auto sx = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return options.height - margin - (y - ymin) / (ymax - ymin) * plot_h; };

  // category -> palette index, in order of first appearance
  std::vector<std::string> categories;
  for (const ScatterPoint& p : points)
    if (!options.continuous &&
        std::find(categories.begin(), categories.end(), p.category) == categories.end())
      categories.push_back(p.category);

  double vmin = 0.0, vmax = 1.0;
  if (options.continuous) {
    bool first = true;
    for (const ScatterPoint& p : points)
      if (p.value) {
        if (first || *p.value < vmin) vmin = *p.value;
        if (first || *p.value > vmax) vmax = *p.value;
        first = false;
      }
    if (!(vmax > vmin)) vmax = vmin + 1.0;
  }

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!-- elemvae " << kToolVersion << " seed=" << seed << " config=" << config_hash
      << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << options.width
      << "\" height=\"" << options.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
      << options.title << "</text>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#888\"/>\n";

  for (const ScatterPoint& p : points) {
    std::string fill, stroke = "none";
    bool hollow = false;
    if (options.continuous) {
      if (p.value) {
        fill = ramp_color((*p.value - vmin) / (vmax - vmin));
      } else {
        hollow = true;
        fill = "none";
        stroke = "#555";
      }
    } else {
      std::size_t ci =
          std::find(categories.begin(), categories.end(), p.category) - categories.begin();
      fill = kPalette[ci % kPaletteSize];
    }
    out << "<circle cx=\"" << fmt2(sx(p.x)) << "\" cy=\"" << fmt2(sy(p.y))
        << "\" r=\"4\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"";
    if (hollow) out << " stroke-width=\"1.2\"";
    out << "/>\n";
    if (options.show_labels && !p.label.empty())
      out << "<text x=\"" << fmt2(sx(p.x) + 5) << "\" y=\"" << fmt2(sy(p.y) - 4)
          << "\" font-family=\"sans-serif\" font-size=\"8\" fill=\"#333\">" << p.label
          << "</text>\n";
  }

  // legend
  int lx = options.width - legend_w - margin / 2, ly = margin + 6;
  if (!options.continuous) {
    for (std::size_t c = 0; c < categories.size(); ++c) {
      out << "<circle cx=\"" << lx << "\" cy=\"" << ly + 18 * static_cast<int>(c)
          << "\" r=\"5\" fill=\"" << kPalette[c % kPaletteSize] << "\"/>\n";
      out << "<text x=\"" << lx + 10 << "\" y=\"" << ly + 4 + 18 * static_cast<int>(c)
          << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << (categories[c].empty() ? "(none)" : categories[c]) << "</text>\n";
    }
  } else {
    for (int s = 0; s < 10; ++s) {
      out << "<rect x=\"" << lx << "\" y=\"" << ly + 12 * s << "\" width=\"16\" height=\"12\" fill=\""
          << ramp_color(1.0 - s / 9.0) << "\"/>\n";
    }
    out << "<text x=\"" << lx + 20 << "\" y=\"" << ly + 10
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt2(vmax) << "</text>\n";
    out << "<text x=\"" << lx + 20 << "\" y=\"" << ly + 118
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt2(vmin) << "</text>\n";
    out << "<circle cx=\"" << lx + 8 << "\" cy=\"" << ly + 142
        << "\" r=\"4\" fill=\"none\" stroke=\"#555\"/>\n";
    out << "<text x=\"" << lx + 20 << "\" y=\"" << ly + 146
        << "\" font-family=\"sans-serif\" font-size=\"10\">missing</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("failed writing: " + path);
}

}  // namespace elemvae::io
