#include "pimex/trajectory.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <numeric>
#include <sstream>
#include <string>

namespace pimex {
namespace {

constexpr std::array<char, 8> kMagic{'I', 'M', 'X', 'T', 'R', 'A', 'J', '1'};

template <class UInt>
UInt to_little(UInt v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    UInt out = 0;
    for (size_t b = 0; b < sizeof(UInt); ++b) {
      out = static_cast<UInt>((out << 8) | ((v >> (8 * b)) & 0xFF));
    }
    return out;
  }
}

void put_u32(std::string& buf, std::uint32_t v) {
  v = to_little(v);
  char bytes[4];
  std::memcpy(bytes, &v, 4);
  buf.append(bytes, 4);
}

void put_f64(std::string& buf, double x) {
  std::uint64_t v = to_little(std::bit_cast<std::uint64_t>(x));
  char bytes[8];
  std::memcpy(bytes, &v, 8);
  buf.append(bytes, 8);
}

void put_state(std::string& buf, const PartitionedState& u) {
  for (const auto& part : u)
    for (Index k = 0; k < part.size(); ++k) put_f64(buf, part(k));
}

class Reader {
 public:
  Reader(const char* data, size_t size) : data_(data), size_(size) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, data_ + pos_, 4);
    pos_ += 4;
    return to_little(v);
  }

  double f64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, data_ + pos_, 8);
    pos_ += 8;
    return std::bit_cast<double>(to_little(v));
  }

  PartitionedState state(const std::vector<Index>& dims) {
    PartitionedState u;
    for (Index d : dims) {
      Vector part(d);
      for (Index k = 0; k < d; ++k) part(k) = f64();
      u.push_back(std::move(part));
    }
    return u;
  }

  size_t position() const { return pos_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > size_) throw FormatError("trajectory file is truncated");
  }

  const char* data_;
  size_t size_;
  size_t pos_ = 0;
};

Index sum(const std::vector<Index>& v) { return std::accumulate(v.begin(), v.end(), Index{0}); }

std::string encode_header(const TrajectoryLayout& layout, Index count) {
  std::string buf(kMagic.data(), kMagic.size());
  put_u32(buf, static_cast<std::uint32_t>(count));
  put_u32(buf, static_cast<std::uint32_t>(layout.stages));
  put_u32(buf, static_cast<std::uint32_t>(layout.state_dims.size()));
  for (Index d : layout.state_dims) put_u32(buf, static_cast<std::uint32_t>(d));
  for (Index d : layout.coupling_dims) put_u32(buf, static_cast<std::uint32_t>(d));
  put_u32(buf, static_cast<std::uint32_t>(layout.n_mu));
  return buf;
}

std::uint64_t record_size_bytes(const TrajectoryLayout& layout) {
  const Index n_state = sum(layout.state_dims);
  const Index n_coupling = sum(layout.coupling_dims);
  const Index per_stage = 1 + 3 * n_state + n_coupling;
  return static_cast<std::uint64_t>(8 * (3 + n_state + layout.stages * per_stage));
}

void check_record(const TrajectoryLayout& layout, const StageRecord& r) {
  auto fits = [&](const PartitionedState& u, const std::vector<Index>& dims) {
    if (u.size() != dims.size()) return false;
    for (size_t i = 0; i < dims.size(); ++i)
      if (u[i].size() != dims[i]) return false;
    return true;
  };
  const auto s = static_cast<size_t>(layout.stages);
  bool ok = fits(r.u_prev, layout.state_dims) && r.stage_time.size() == s &&
            r.stage_state.size() == s && r.k_implicit.size() == s && r.k_explicit.size() == s &&
            r.predictor.size() == s;
  for (size_t j = 0; ok && j < s; ++j) {
    ok = fits(r.stage_state[j], layout.state_dims) && fits(r.k_implicit[j], layout.state_dims) &&
         fits(r.k_explicit[j], layout.state_dims) && fits(r.predictor[j], layout.coupling_dims);
  }
  if (!ok) throw DimensionError("stage record does not match trajectory layout");
}

std::string encode_record(const StageRecord& r) {
  std::string buf;
  put_f64(buf, static_cast<double>(r.step));
  put_f64(buf, r.t_start);
  put_f64(buf, r.dt);
  put_state(buf, r.u_prev);
  for (size_t j = 0; j < r.stage_time.size(); ++j) {
    put_f64(buf, r.stage_time[j]);
    put_state(buf, r.stage_state[j]);
    put_state(buf, r.k_implicit[j]);
    put_state(buf, r.k_explicit[j]);
    put_state(buf, r.predictor[j]);
  }
  return buf;
}

StageRecord decode_record(Reader& in, const TrajectoryLayout& layout) {
  StageRecord r;
  r.step = static_cast<Index>(in.f64());
  r.t_start = in.f64();
  r.dt = in.f64();
  r.u_prev = in.state(layout.state_dims);
  for (Index j = 0; j < layout.stages; ++j) {
    r.stage_time.push_back(in.f64());
    r.stage_state.push_back(in.state(layout.state_dims));
    r.k_implicit.push_back(in.state(layout.state_dims));
    r.k_explicit.push_back(in.state(layout.state_dims));
    r.predictor.push_back(in.state(layout.coupling_dims));
  }
  return r;
}

}  // namespace

TrajectoryLayout layout_of(const StageRecord& record, Index n_mu) {
  TrajectoryLayout layout;
  layout.stages = static_cast<Index>(record.stage_time.size());
  for (const auto& part : record.u_prev) layout.state_dims.push_back(part.size());
  if (!record.predictor.empty())
    for (const auto& part : record.predictor.front()) layout.coupling_dims.push_back(part.size());
  layout.n_mu = n_mu;
  return layout;
}

void MemoryTrajectory::begin(const TrajectoryLayout& layout, const PartitionedState& u0) {
  layout_ = layout;
  u0_ = u0;
  records_.clear();
}

void MemoryTrajectory::append(const StageRecord& record) {
  check_record(layout_, record);
  records_.push_back(record);
}

const StageRecord& MemoryTrajectory::at(Index n) const {
  if (n < 1 || n > size()) {
    throw std::out_of_range("trajectory record " + std::to_string(n) + " out of range [1, " +
                            std::to_string(size()) + "]");
  }
  return records_[static_cast<size_t>(n - 1)];
}

StageRecord MemoryTrajectory::get(Index n) const { return at(n); }

FileTrajectory::FileTrajectory(std::filesystem::path path) : path_(std::move(path)) {}

void FileTrajectory::begin(const TrajectoryLayout& layout, const PartitionedState& u0) {
  std::lock_guard lock(mutex_);
  layout_ = layout;
  u0_ = u0;
  count_ = 0;
  if (file_.is_open()) file_.close();
  file_.open(path_, std::ios::binary | std::ios::in | std::ios::out | std::ios::trunc);
  if (!file_) throw FormatError("cannot open trajectory file '" + path_.string() + "'");
  std::string head = encode_header(layout_, 0);
  put_state(head, u0_);
  file_.write(head.data(), static_cast<std::streamsize>(head.size()));
  body_offset_ = head.size();
  record_bytes_ = record_size_bytes(layout_);
  if (!file_) throw FormatError("write to trajectory file '" + path_.string() + "' failed");
}

void FileTrajectory::append(const StageRecord& record) {
  check_record(layout_, record);
  std::lock_guard lock(mutex_);
  if (!file_.is_open()) throw FormatError("trajectory file not initialized");
  const std::string buf = encode_record(record);
  file_.seekp(static_cast<std::streamoff>(body_offset_ + record_bytes_ * count_));
  file_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  ++count_;
  // Keep the on-disk header consistent after every append.
  std::string n_t;
  put_u32(n_t, static_cast<std::uint32_t>(count_));
  file_.seekp(static_cast<std::streamoff>(kMagic.size()));
  file_.write(n_t.data(), 4);
  file_.flush();
  if (!file_) throw FormatError("write to trajectory file '" + path_.string() + "' failed");
}

StageRecord FileTrajectory::get(Index n) const {
  if (n < 1 || n > count_) {
    throw std::out_of_range("trajectory record " + std::to_string(n) + " out of range [1, " +
                            std::to_string(count_) + "]");
  }
  std::string buf(record_bytes_, '\0');
  {
    std::lock_guard lock(mutex_);
    file_.seekg(static_cast<std::streamoff>(body_offset_ + record_bytes_ * (n - 1)));
    file_.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!file_) throw FormatError("read from trajectory file '" + path_.string() + "' failed");
  }
  Reader in(buf.data(), buf.size());
  return decode_record(in, layout_);
}

void write_trajectory(const TrajectoryStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  std::string buf = encode_header(store.layout(), store.size());
  put_state(buf, store.initial_state());
  for (Index n = 1; n <= store.size(); ++n) buf += encode_record(store.get(n));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("write to '" + path.string() + "' failed");
}

MemoryTrajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open trajectory file '" + path.string() + "'");
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), data.begin())) {
    if (data.size() >= 7 && data.compare(0, 7, "IMXTRAJ") == 0) {
      throw FormatError("unsupported trajectory format version '" + data.substr(0, 8) + "'");
    }
    throw FormatError("'" + path.string() + "' is not a trajectory file");
  }
  Reader r(data.data() + kMagic.size(), data.size() - kMagic.size());
  const Index count = r.u32();
  TrajectoryLayout layout;
  layout.stages = r.u32();
  const Index m = r.u32();
  for (Index i = 0; i < m; ++i) layout.state_dims.push_back(r.u32());
  for (Index i = 0; i < m; ++i) layout.coupling_dims.push_back(r.u32());
  layout.n_mu = r.u32();

  MemoryTrajectory store;
  store.begin(layout, r.state(layout.state_dims));
  for (Index n = 0; n < count; ++n) store.append(decode_record(r, layout));
  if (r.position() != data.size() - kMagic.size()) {
    throw FormatError("trajectory file has trailing bytes");
  }
  return store;
}

}  // namespace pimex
