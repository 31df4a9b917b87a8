#include "tinylof/csv.hpp"

#include "tinylof/error.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>

namespace tinylof {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  for (;;) {
    const auto comma = line.find(',');
    fields.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos)
      break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

[[noreturn]] void fail(std::size_t line, const std::string &msg) {
  throw InputError("line " + std::to_string(line) + ": " + msg);
}

} // namespace

std::vector<CsvRow> read_samples_csv(std::istream &in,
                                     std::optional<std::size_t> expected_channels) {
  std::vector<CsvRow> rows;
  std::string text;
  std::size_t line_no = 0;
  std::size_t channels = 0;
  std::optional<std::size_t> regime_col;
  std::optional<std::size_t> control_col;
  std::size_t columns = 0;
  bool have_header = false;

  while (std::getline(in, text)) {
    ++line_no;
    const auto line = trim(text);
    if (line.empty() || line.front() == '#')
      continue;
    const auto fields = split(line);

    if (!have_header) {
      if (fields.front() != "t")
        fail(line_no, "header must start with column 't'");
      std::size_t i = 1;
      while (i < fields.size() && fields[i] == "ch" + std::to_string(i))
        ++i;
      channels = i - 1;
      if (i < fields.size() && fields[i] == "regime")
        regime_col = i++;
      if (i < fields.size() && fields[i] == "control")
        control_col = i++;
      if (i != fields.size())
        fail(line_no, "unexpected header column '" + std::string(fields[i]) + "'");
      if (channels == 0)
        fail(line_no, "header names no channel columns");
      if (expected_channels && channels != *expected_channels)
        fail(line_no, "header has " + std::to_string(channels) + " channels, config expects " +
                          std::to_string(*expected_channels));
      columns = fields.size();
      have_header = true;
      continue;
    }

    if (fields.size() != columns)
      fail(line_no, "expected " + std::to_string(columns) + " fields, found " +
                        std::to_string(fields.size()));
    CsvRow row;
    row.line = line_no;
    {
      const auto f = fields[0];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row.sample.t);
      if (ec != std::errc{} || ptr != f.data() + f.size())
        fail(line_no, "bad tick '" + std::string(f) + "'");
    }
    row.sample.channels.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) {
      const auto f = fields[c + 1];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size())
        fail(line_no, "bad value '" + std::string(f) + "' in ch" + std::to_string(c + 1));
      row.sample.channels[c] = v;
    }
    if (regime_col)
      row.regime = std::string(fields[*regime_col]);
    if (control_col) {
      const auto f = fields[*control_col];
      if (f.empty())
        row.control = Control::None;
      else if (f == "train")
        row.control = Control::Train;
      else if (f == "detect")
        row.control = Control::Detect;
      else if (f == "retrain")
        row.control = Control::Retrain;
      else
        fail(line_no, "unknown control directive '" + std::string(f) + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<TraceRecord> trace_record(const PipelineEvent &ev, Phase phase, Tick tick) {
  if (std::holds_alternative<NoEvent>(ev))
    return std::nullopt;
  TraceRecord rec;
  rec.phase = phase;
  if (const auto *s = std::get_if<VectorSampled>(&ev)) {
    rec.window_end = s->window_end;
    rec.event = s->retrained ? "retrained" : "sampled";
  } else if (std::holds_alternative<Retrained>(ev)) {
    rec.window_end = tick;
    rec.event = "retrained";
  } else if (const auto *s = std::get_if<Scored>(&ev)) {
    rec.window_end = s->window_end;
    rec.event = "scored";
    rec.score = s->score;
    rec.is_anomaly = s->is_anomaly;
  }
  return rec;
}

void write_trace_header(std::ostream &out) { out << "window_end,phase,event,score,is_anomaly\n"; }

void write_trace_record(std::ostream &out, const TraceRecord &rec) {
  out << rec.window_end << ',' << phase_name(rec.phase) << ',' << rec.event << ',';
  if (rec.score) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", *rec.score);
    out << buf;
  }
  out << ',' << (rec.is_anomaly ? 1 : 0) << '\n';
}

} // namespace tinylof
