#pragma once

#include "tinylof/dsp.hpp"
#include "tinylof/pipeline.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tinylof {

/// Phase directive carried by the optional `control` column.
enum class Control : std::uint8_t { None, Train, Detect, Retrain };

struct CsvRow {
  std::size_t line = 0;
  Sample sample;
  std::string regime;
  Control control = Control::None;
};

/// Reads `t,ch1..chC[,regime][,control]` with a header row. Blank lines and
/// lines starting with '#' are skipped. When `expected_channels` is set the
/// header must name exactly that many channels. Errors are InputError
/// messages that start with "line N:".
std::vector<CsvRow> read_samples_csv(std::istream &in,
                                     std::optional<std::size_t> expected_channels = {});

struct TraceRecord {
  Tick window_end = 0;
  Phase phase = Phase::Training;
  std::string event;
  std::optional<double> score;
  bool is_anomaly = false;
};

/// Record for a pipeline event, or nullopt for NoEvent.
std::optional<TraceRecord> trace_record(const PipelineEvent &ev, Phase phase, Tick tick);

/// `window_end,phase,event,score,is_anomaly` plus one line per record.
void write_trace_header(std::ostream &out);
void write_trace_record(std::ostream &out, const TraceRecord &rec);

} // namespace tinylof
