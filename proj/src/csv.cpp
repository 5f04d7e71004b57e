#include "qkdsim/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qkdsim {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, std::span<const TimeSeries> series) {
  std::vector<const TimeSeries*> order;
  for (const auto& s : series) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(),
                   [](const TimeSeries* a, const TimeSeries* b) { return a->label < b->label; });

  os << "series_label,tick,time_seconds,value\n";
  for (const TimeSeries* s : order) {
    std::vector<const SeriesPoint*> points;
    points.reserve(s->points.size());
    for (const auto& p : s->points) points.push_back(&p);
    std::stable_sort(points.begin(), points.end(),
                     [](const SeriesPoint* a, const SeriesPoint* b) { return a->tick < b->tick; });
    for (const SeriesPoint* p : points) {
      os << s->label << ',' << p->tick << ',' << num(p->time_seconds) << ',' << num(p->value) << '\n';
    }
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void emit_csv(std::span<const TimeSeries> series, const std::filesystem::path& path) {
  std::ostringstream os;
  write_csv(os, series);
  write_text_file(path, os.str());
}

void emit_summary(std::span<const SeriesSummary> summaries, const std::filesystem::path& path) {
  std::ostringstream os;
  for (const auto& s : summaries) {
    os << "label=" << s.label << " fiber_length_km=" << num(s.fiber_length_km) << " seed=" << s.seed
       << " min=" << num(s.min) << " max=" << num(s.max) << " range=" << num(s.range)
       << " std=" << num(s.std_dev) << " decorrelation_s=" << num(s.decorrelation_s) << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace qkdsim
