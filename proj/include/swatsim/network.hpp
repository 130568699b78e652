#pragma once

#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swatsim/tag.hpp"

namespace swatsim {

/// Observer ids: "RIO1".."RIO6", "PLC1".."PLC6", "SCADA", "HISTORIAN".
struct Message {
  Tick tick = 0;
  std::string source;
  std::string destination;
  std::string tag;
  double value = 0.0;
};

struct TamperHook {
  enum class Kind { RewriteTag, Drop, Delay, Disconnect };

  Kind kind = Kind::Drop;
  std::string tag;  // empty: every tag
  std::optional<double> forged;  // RewriteTag: replacement value ...
  double offset = 0.0;           // ... or offset added when `forged` is empty
  int delay_ticks = 0;
  Tick start = 0;
  Tick end = 0;  // inclusive
  std::string label;

  bool active(Tick t) const { return t >= start && t <= end; }
  bool matches(const std::string& t) const { return tag.empty() || tag == t; }

  static TamperHook rewrite(std::string tag, double value, Tick start, Tick end);
  static TamperHook shift(std::string tag, double offset, Tick start, Tick end);
  static TamperHook drop(std::string tag, Tick start, Tick end);
  static TamperHook delay(std::string tag, int ticks, Tick start, Tick end);
  static TamperHook disconnect(Tick start, Tick end);
};

/// A directed link. Hooks apply in installation order; no hooks is identity.
class Channel {
 public:
  Channel(int id, int level, std::string source, std::string destination)
      : id_(id), level_(level), source_(std::move(source)), destination_(std::move(destination)) {}

  int id() const { return id_; }
  int level() const { return level_; }
  const std::string& source() const { return source_; }
  const std::string& destination() const { return destination_; }
  const std::vector<TamperHook>& hooks() const { return hooks_; }

  void install(TamperHook hook) { hooks_.push_back(std::move(hook)); }
  /// Removes hooks whose window closed before `now`.
  void expire(Tick now);
  bool has_active_hook(Tick now) const;

  /// Messages held back by Delay hooks whose release tick has come.
  std::vector<Message> release(Tick now);

  friend std::optional<Message> deliver(Channel& channel, Message message);

 private:
  int id_;
  int level_;
  std::string source_;
  std::string destination_;
  std::vector<TamperHook> hooks_;
  std::deque<std::pair<Tick, Message>> delayed_;
};

/// Runs the message through the channel's active hooks. Returns the delivered
/// message, or nullopt when a hook consumed or delayed it. Throws Error when
/// the message endpoints do not match the channel.
std::optional<Message> deliver(Channel& channel, Message message);

struct HistorianMutation {
  Tick tick = 0;
  std::string tag;
  double original = 0.0;
  double forged = 0.0;
};

/// Append-only time-series store of Level-1 delivered values.
class HistorianStore {
 public:
  using Series = std::vector<std::pair<Tick, double>>;

  /// Extends every series in `snapshot` with (tick, value). Throws Error on a
  /// duplicate or out-of-order tick.
  void append(Tick tick, const std::map<std::string, double>& snapshot);

  /// Historian attack primitive: overwrites the stored value at `tick`. The
  /// change is recorded in the tamper log.
  void mutate(const std::string& tag, Tick tick, double value);

  /// Pairs with tick in [from, to]. Throws Error for an unknown tag or an
  /// empty window.
  Series query(const std::string& tag, Tick from, Tick to) const;

  /// Every tag's value stored at exactly `tick`.
  std::map<std::string, double> row(Tick tick) const;

  std::optional<Tick> last_tick() const { return last_tick_; }
  std::vector<Tick> ticks() const;
  const std::map<std::string, Series>& series() const { return series_; }
  const std::vector<HistorianMutation>& tamper_log() const { return tamper_log_; }

  /// CSV with header `tick,<tag>,...` in registry order; a blank cell means no value.
  void write_csv(std::ostream& out) const;
  /// Parses CSV produced by write_csv or an external file of the same shape.
  /// Throws Error listing unknown columns; absent tag columns are allowed and
  /// reported through `missing_columns`.
  static HistorianStore read_csv(std::istream& in, std::vector<std::string>* missing_columns = nullptr);

 private:
  std::map<std::string, Series> series_;
  std::vector<HistorianMutation> tamper_log_;
  std::optional<Tick> last_tick_;
};

/// SCADA/HMI display state.
struct ScadaView {
  std::map<std::string, double> display;
  std::map<std::string, Tick> stale_age;
  bool defaced = false;

  /// `sent` messages were addressed to SCADA this tick; `delivered` survived.
  void update(Tick tick, std::size_t sent, const std::vector<Message>& delivered);

 private:
  std::map<std::string, Tick> last_update_;
};

}  // namespace swatsim
