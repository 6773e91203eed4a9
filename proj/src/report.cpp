#include "netgeom/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace netgeom {

Verdict Report::summary() const {
  Verdict v = Verdict::Holds;
  for (const auto& l : lines) {
    if (!l.counted) continue;
    if (l.verdict == Verdict::Fails) return Verdict::Fails;
    if (l.verdict == Verdict::Inconclusive) v = Verdict::Inconclusive;
  }
  return v;
}

int Report::exit_code() const {
  switch (summary()) {
    case Verdict::Fails: return 2;
    case Verdict::Inconclusive: return 3;
    default: return 0;
  }
}

Format parse_format(const std::string& s) {
  if (s == "text") return Format::Text;
  if (s == "json") return Format::Json;
  throw std::invalid_argument("unknown format '" + s + "' (expected text or json)");
}

namespace {

std::string sci(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

void write(std::ostringstream& out, const ordered_json& j, int indent) {
  const std::string pad(indent + 2, ' '), close(indent, ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << ordered_json(k).dump() << ": ";
        write(out, v, indent + 2);
      }
      out << "\n" << close << "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && v.is_primitive();
      if (scalars) {
        out << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          write(out, j[i], indent);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write(out, j[i], indent + 2);
      }
      out << "\n" << close << "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      out << (std::isfinite(v) ? sci(v, 12) : "null");
      return;
    }
    default: out << j.dump();
  }
}

ordered_json line_json(const ReportLine& l) {
  ordered_json o;
  o["subject"] = l.subject;
  o["verdict"] = to_string(l.verdict);
  o["counted"] = l.counted;
  o["residual"] = l.residual ? ordered_json(*l.residual) : ordered_json(nullptr);
  o["tolerance"] = l.tolerance ? ordered_json(*l.tolerance) : ordered_json(nullptr);
  if (!l.note.empty()) o["note"] = l.note;
  return o;
}

std::string text(const Report& r) {
  std::ostringstream out;
  out << "command: " << r.command << "\n";
  for (const auto& [k, v] : r.settings.items()) out << k << ": " << (v.is_number_float() ? sci(v.get<double>(), 3) : v.dump()) << "\n";
  std::size_t width = 0;
  for (const auto& l : r.lines) width = std::max(width, l.subject.size());
  for (const auto& l : r.lines) {
    std::string v = to_string(l.verdict);
    out << (l.counted ? "  " : "  (") << v << (l.counted ? "" : ")");
    out << std::string(17 - v.size() - (l.counted ? 0 : 2), ' ') << l.subject << std::string(width - l.subject.size(), ' ');
    if (l.residual) out << "  residual " << sci(*l.residual, 3);
    if (l.tolerance) out << "  tol " << sci(*l.tolerance, 1);
    if (!l.note.empty()) out << "  " << l.note;
    out << "\n";
  }
  if (r.wall_clock) out << "wall clock: " << sci(*r.wall_clock, 3) << " s\n";
  out << "summary: " << to_string(r.summary()) << " (exit " << r.exit_code() << ")\n";
  return out.str();
}

}  // namespace

std::string dump_json(const ordered_json& j) {
  std::ostringstream out;
  write(out, j, 0);
  out << "\n";
  return out.str();
}

std::string emit(const Report& r, Format format) {
  if (format == Format::Text) return text(r);
  ordered_json doc;
  doc["command"] = r.command;
  doc["settings"] = r.settings;
  doc["result"] = r.result;
  ordered_json lines = ordered_json::array();
  for (const auto& l : r.lines) lines.push_back(line_json(l));
  doc["verdicts"] = lines;
  doc["summary"] = to_string(r.summary());
  doc["exit_code"] = r.exit_code();
  if (r.wall_clock) doc["wall_clock_seconds"] = *r.wall_clock;
  return dump_json(doc);
}

}  // namespace netgeom
