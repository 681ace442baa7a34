#pragma once

#include <string>
#include <vector>

#include "skiff/event.hpp"

namespace skiff {

enum class StatusCode : uint8_t {
  no_error,       // call succeeded
  not_available,  // queuing send refused on a full queue (status-reporting variant)
  invalid_param,  // call rejected: bad port, wrong mode/direction, not the owner
  none,           // read/receive found no message
  exists,         // queuing source status: creation is all the owner may learn
};

inline const char* status_name(StatusCode c) {
  switch (c) {
    case StatusCode::no_error: return "NO_ERROR";
    case StatusCode::not_available: return "NOT_AVAILABLE";
    case StatusCode::invalid_param: return "INVALID_PARAM";
    case StatusCode::none: return "NONE";
    case StatusCode::exists: return "EXISTS";
  }
  return "?";
}

// Last-result register value. Hypercalls and partition actions overwrite the
// caller's register; it is the only observation a domain accumulates.
struct Value {
  enum class Kind : uint8_t { unset, status, port_id, msg, count, action };
  Kind kind = Kind::unset;
  int16_t v = 0;

  bool operator==(const Value& o) const { return kind == o.kind && v == o.v; }
  bool operator!=(const Value& o) const { return !(*this == o); }

  static Value status(StatusCode c) { return {Kind::status, (int16_t)c}; }
  static Value port_id(int id) { return {Kind::port_id, (int16_t)id}; }
  static Value msg(int tok) { return {Kind::msg, (int16_t)tok}; }
  static Value count(int n) { return {Kind::count, (int16_t)n}; }
  static Value action(int tok) { return {Kind::action, (int16_t)tok}; }
};

inline std::string render_value(const SysConfig& cfg, const Value& val) {
  switch (val.kind) {
    case Value::Kind::unset: return "-";
    case Value::Kind::status: return status_name((StatusCode)val.v);
    case Value::Kind::port_id: return "id=" + std::to_string(val.v);
    case Value::Kind::msg: return message_name(val.v);
    case Value::Kind::count: return "count=" + std::to_string(val.v);
    case Value::Kind::action: return action_token_name(cfg, val.v);
  }
  return "?";
}

struct LocalStore {
  Value ret;

  bool operator==(const LocalStore& o) const { return ret == o.ret; }
};

// Buffer of a created port. Sampling ports hold at most one message (a write
// overwrites, a read does not consume); queuing ports hold a FIFO, front at
// index 0, bounded by the configured capacity.
struct PortState {
  std::vector<int8_t> buf;

  bool operator==(const PortState& o) const { return buf == o.buf; }
};

// Port slots are indexed by runtime id - 1. A slot is live iff cfg_port >= 0;
// cfg_port identifies the configured port bound to that id, and id_of_port is
// the inverse map (0 = not created).
struct CommState {
  std::vector<int16_t> cfg_port;
  std::vector<PortState> ports;
  std::vector<int16_t> id_of_port;

  bool created(int cfg_idx) const { return id_of_port[cfg_idx] != 0; }
  int live_count() const {
    int n = 0;
    for (int16_t c : cfg_port) n += (c >= 0);
    return n;
  }

  bool operator==(const CommState& o) const {
    return cfg_port == o.cfg_port && ports == o.ports && id_of_port == o.id_of_port;
  }
};

constexpr uint8_t k_mode_normal = 0;

struct State {
  int16_t current = 0;              // domain index; partitions and transmitter only
  std::vector<uint8_t> part_mode;   // per partition; stays k_mode_normal
  CommState comm;
  std::vector<LocalStore> locals;   // per domain index
  int16_t next_port_id = 0;         // counter strategy only; 0 under static

  bool operator==(const State& o) const {
    return current == o.current && part_mode == o.part_mode && comm == o.comm &&
           locals == o.locals && next_port_id == o.next_port_id;
  }
  bool operator!=(const State& o) const { return !(*this == o); }
};

// Canonical byte form used for hashing and deduplication. Fixed layout, no
// map iteration anywhere, so equal states serialize identically.
inline void serialize_state(const State& s, std::string& out) {
  out.clear();
  auto put16 = [&](int16_t x) {
    out.push_back((char)(x & 0xff));
    out.push_back((char)((x >> 8) & 0xff));
  };
  put16(s.current);
  out.push_back((char)s.part_mode.size());
  for (uint8_t m : s.part_mode) out.push_back((char)m);
  out.push_back((char)s.comm.cfg_port.size());
  for (size_t i = 0; i < s.comm.cfg_port.size(); ++i) {
    put16(s.comm.cfg_port[i]);
    const auto& buf = s.comm.ports[i].buf;
    out.push_back((char)buf.size());
    for (int8_t b : buf) out.push_back((char)b);
  }
  for (const LocalStore& ls : s.locals) {
    out.push_back((char)ls.ret.kind);
    put16(ls.ret.v);
  }
  put16(s.next_port_id);
}

inline std::string serialize_state(const State& s) {
  std::string out;
  serialize_state(s, out);
  return out;
}

inline uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace skiff
