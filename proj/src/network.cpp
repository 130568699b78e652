#include "swatsim/network.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace swatsim {

TamperHook TamperHook::rewrite(std::string tag, double value, Tick start, Tick end) {
  TamperHook h;
  h.kind = Kind::RewriteTag;
  h.tag = std::move(tag);
  h.forged = value;
  h.start = start;
  h.end = end;
  return h;
}

TamperHook TamperHook::shift(std::string tag, double offset, Tick start, Tick end) {
  TamperHook h;
  h.kind = Kind::RewriteTag;
  h.tag = std::move(tag);
  h.offset = offset;
  h.start = start;
  h.end = end;
  return h;
}

TamperHook TamperHook::drop(std::string tag, Tick start, Tick end) {
  TamperHook h;
  h.kind = Kind::Drop;
  h.tag = std::move(tag);
  h.start = start;
  h.end = end;
  return h;
}

TamperHook TamperHook::delay(std::string tag, int ticks, Tick start, Tick end) {
  TamperHook h;
  h.kind = Kind::Delay;
  h.tag = std::move(tag);
  h.delay_ticks = ticks;
  h.start = start;
  h.end = end;
  return h;
}

TamperHook TamperHook::disconnect(Tick start, Tick end) {
  TamperHook h;
  h.kind = Kind::Disconnect;
  h.start = start;
  h.end = end;
  return h;
}

void Channel::expire(Tick now) {
  std::erase_if(hooks_, [now](const TamperHook& h) { return h.end < now; });
}

bool Channel::has_active_hook(Tick now) const {
  return std::any_of(hooks_.begin(), hooks_.end(), [now](const TamperHook& h) { return h.active(now); });
}

std::vector<Message> Channel::release(Tick now) {
  std::vector<Message> out;
  while (!delayed_.empty() && delayed_.front().first <= now) {
    out.push_back(std::move(delayed_.front().second));
    delayed_.pop_front();
  }
  return out;
}

std::optional<Message> deliver(Channel& channel, Message message) {
  if (message.source != channel.source_ || message.destination != channel.destination_)
    throw Error("message " + message.source + "->" + message.destination + " does not match channel " +
                channel.source_ + "->" + channel.destination_);
  for (const auto& hook : channel.hooks_) {
    if (!hook.active(message.tick)) continue;
    switch (hook.kind) {
      case TamperHook::Kind::Disconnect:
        return std::nullopt;
      case TamperHook::Kind::Drop:
        if (hook.matches(message.tag)) return std::nullopt;
        break;
      case TamperHook::Kind::RewriteTag:
        if (hook.matches(message.tag)) message.value = hook.forged ? *hook.forged : message.value + hook.offset;
        break;
      case TamperHook::Kind::Delay:
        if (hook.matches(message.tag)) {
          Tick due = message.tick + hook.delay_ticks;
          auto pos = std::upper_bound(channel.delayed_.begin(), channel.delayed_.end(), due,
                                      [](Tick t, const auto& e) { return t < e.first; });
          channel.delayed_.insert(pos, {due, std::move(message)});
          return std::nullopt;
        }
        break;
    }
  }
  return message;
}

void HistorianStore::append(Tick tick, const std::map<std::string, double>& snapshot) {
  if (last_tick_ && tick <= *last_tick_)
    throw Error("historian append rejected: tick " + std::to_string(tick) + " not after " +
                std::to_string(*last_tick_));
  for (const auto& [tag, value] : snapshot) series_[tag].emplace_back(tick, value);
  last_tick_ = tick;
}

void HistorianStore::mutate(const std::string& tag, Tick tick, double value) {
  auto it = series_.find(tag);
  if (it == series_.end()) throw Error("historian has no series for tag '" + tag + "'");
  auto& s = it->second;
  auto p = std::lower_bound(s.begin(), s.end(), tick, [](const auto& e, Tick t) { return e.first < t; });
  if (p == s.end() || p->first != tick)
    throw Error("historian has no value for " + tag + " at tick " + std::to_string(tick));
  tamper_log_.push_back({tick, tag, p->second, value});
  p->second = value;
}

HistorianStore::Series HistorianStore::query(const std::string& tag, Tick from, Tick to) const {
  if (to < from) throw Error("empty query window");
  auto it = series_.find(tag);
  if (it == series_.end()) throw Error("historian has no series for tag '" + tag + "'");
  Series out;
  for (const auto& e : it->second)
    if (e.first >= from && e.first <= to) out.push_back(e);
  return out;
}

std::map<std::string, double> HistorianStore::row(Tick tick) const {
  std::map<std::string, double> out;
  for (const auto& [tag, s] : series_) {
    auto p = std::lower_bound(s.begin(), s.end(), tick, [](const auto& e, Tick t) { return e.first < t; });
    if (p != s.end() && p->first == tick) out[tag] = p->second;
  }
  return out;
}

std::vector<Tick> HistorianStore::ticks() const {
  std::vector<Tick> out;
  for (const auto& [tag, s] : series_)
    for (const auto& e : s) out.push_back(e.first);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void HistorianStore::write_csv(std::ostream& out) const {
  std::vector<std::string> cols;
  for (const auto& t : TagRegistry::swat().all())
    if (series_.count(t.name)) cols.push_back(t.name);
  out << "tick";
  for (const auto& c : cols) out << ',' << c;
  out << '\n';
  std::map<std::string, std::size_t> cursor;
  for (Tick t : ticks()) {
    out << t;
    for (const auto& c : cols) {
      out << ',';
      const auto& s = series_.at(c);
      std::size_t& i = cursor[c];
      while (i < s.size() && s[i].first < t) ++i;
      if (i < s.size() && s[i].first == t) out << format_double(s[i].second);
    }
    out << '\n';
  }
}

HistorianStore HistorianStore::read_csv(std::istream& in, std::vector<std::string>* missing_columns) {
  std::string line;
  if (!std::getline(in, line)) throw Error("historian CSV is empty");
  auto header = split_csv(line);
  if (header.empty() || header[0] != "tick") throw Error("historian CSV header must start with 'tick'");
  const auto& reg = TagRegistry::swat();
  std::vector<std::string> unknown;
  for (std::size_t i = 1; i < header.size(); ++i)
    if (!reg.contains(header[i])) unknown.push_back(header[i]);
  if (!unknown.empty()) {
    std::string msg = "historian CSV schema mismatch; unknown columns:";
    for (const auto& u : unknown) msg += " " + u;
    throw Error(msg);
  }
  if (missing_columns) {
    missing_columns->clear();
    for (const auto& t : reg.all())
      if (std::find(header.begin() + 1, header.end(), t.name) == header.end()) missing_columns->push_back(t.name);
  }

  HistorianStore store;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    if (cells.size() > header.size())
      throw Error("historian CSV line " + std::to_string(line_no) + ": too many cells");
    Tick tick = 0;
    auto r = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), tick);
    if (r.ec != std::errc()) throw Error("historian CSV line " + std::to_string(line_no) + ": bad tick");
    std::map<std::string, double> snap;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i].empty()) continue;
      double v = 0.0;
      auto rv = std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
      if (rv.ec != std::errc())
        throw Error("historian CSV line " + std::to_string(line_no) + ": bad value for " + header[i]);
      snap[header[i]] = v;
    }
    store.append(tick, snap);
  }
  return store;
}

void ScadaView::update(Tick tick, std::size_t sent, const std::vector<Message>& delivered) {
  for (const auto& m : delivered) {
    display[m.tag] = m.value;
    last_update_[m.tag] = tick;
  }
  for (const auto& [tag, t] : last_update_) stale_age[tag] = tick - t;
  defaced = sent > 0 && delivered.empty();
}

}  // namespace swatsim
