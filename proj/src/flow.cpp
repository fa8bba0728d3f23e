#include "repcount/flow.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "repcount/parallel.hpp"

namespace repcount {

namespace {

constexpr float kFloMagic = 202021.25f;

float read_le_float(const uint8_t* p) {
  uint32_t bits = static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
                  static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

int32_t read_le_i32(const uint8_t* p) {
  uint32_t bits = static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
                  static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
  int32_t v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

void append_le_float(std::vector<uint8_t>& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  out.push_back(static_cast<uint8_t>(bits));
  out.push_back(static_cast<uint8_t>(bits >> 8));
  out.push_back(static_cast<uint8_t>(bits >> 16));
  out.push_back(static_cast<uint8_t>(bits >> 24));
}

void append_le_i32(std::vector<uint8_t>& out, int32_t v) {
  uint32_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  out.push_back(static_cast<uint8_t>(bits));
  out.push_back(static_cast<uint8_t>(bits >> 8));
  out.push_back(static_cast<uint8_t>(bits >> 16));
  out.push_back(static_cast<uint8_t>(bits >> 24));
}

std::vector<uint8_t> read_all_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void write_all_bytes(const std::vector<uint8_t>& bytes, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

const std::array<std::string, kNumChannels>& channel_names() {
  static const std::array<std::string, kNumChannels> names = {
      "Fx", "Fy", "GradXFx", "GradYFy", "Div", "Curl"};
  return names;
}

Channel channel_from_name(const std::string& name) {
  const auto& names = channel_names();
  for (int i = 0; i < kNumChannels; ++i) {
    if (names[static_cast<size_t>(i)] == name) return static_cast<Channel>(i);
  }
  throw Error("unknown channel \"" + name + "\"");
}

// ---------------------------------------------------------------------------
// Middlebury .flo

FlowField read_flo(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 12) throw Truncated("flo: header shorter than 12 bytes");
  if (read_le_float(bytes.data()) != kFloMagic)
    throw BadMagic("flo: bad magic, not a Middlebury flow file");
  const int32_t w = read_le_i32(bytes.data() + 4);
  const int32_t h = read_le_i32(bytes.data() + 8);
  if (w < 1 || h < 1) throw Truncated("flo: non-positive dimensions");
  const size_t need = 12 + 8 * static_cast<size_t>(w) * static_cast<size_t>(h);
  if (bytes.size() < need) {
    std::ostringstream msg;
    msg << "flo: payload truncated, need " << need << " bytes, have " << bytes.size();
    throw Truncated(msg.str());
  }
  FlowField f;
  f.u.resize(h, w);
  f.v.resize(h, w);
  const uint8_t* p = bytes.data() + 12;
  for (int32_t y = 0; y < h; ++y) {
    for (int32_t x = 0; x < w; ++x) {
      const float u = read_le_float(p);
      const float v = read_le_float(p + 4);
      p += 8;
      if (!std::isfinite(u) || !std::isfinite(v))
        throw NonFinite("flo: non-finite flow value");
      f.u(y, x) = u;
      f.v(y, x) = v;
    }
  }
  return f;
}

std::vector<uint8_t> write_flo(const FlowField& field) {
  const auto w = static_cast<int32_t>(field.width());
  const auto h = static_cast<int32_t>(field.height());
  std::vector<uint8_t> out;
  out.reserve(12 + 8 * static_cast<size_t>(w) * static_cast<size_t>(h));
  append_le_float(out, kFloMagic);
  append_le_i32(out, w);
  append_le_i32(out, h);
  for (int32_t y = 0; y < h; ++y) {
    for (int32_t x = 0; x < w; ++x) {
      append_le_float(out, field.u(y, x));
      append_le_float(out, field.v(y, x));
    }
  }
  return out;
}

FlowField read_flo_file(const std::string& path) {
  try {
    return read_flo(read_all_bytes(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_flo_file(const FlowField& field, const std::string& path) {
  write_all_bytes(write_flo(field), path);
}

// ---------------------------------------------------------------------------
// netpbm masks

namespace {

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
long pnm_next_int(const std::vector<uint8_t>& b, size_t& pos) {
  while (pos < b.size()) {
    const char c = static_cast<char>(b[pos]);
    if (c == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= b.size() || !std::isdigit(b[pos])) throw Error("pnm: expected integer");
  long v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos] - '0');
    ++pos;
  }
  return v;
}

}  // namespace

ForegroundMask read_mask(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 2) throw Error("pnm: too short");
  const char p0 = static_cast<char>(bytes[0]);
  const char p1 = static_cast<char>(bytes[1]);
  if (p0 != 'P' || (p1 != '5' && p1 != '4')) throw Error("pnm: expected P5 or P4");
  size_t pos = 2;
  const long w = pnm_next_int(bytes, pos);
  const long h = pnm_next_int(bytes, pos);
  if (w < 1 || h < 1) throw Error("pnm: non-positive dimensions");
  ForegroundMask m;
  m.bits.resize(h, w);
  if (p1 == '5') {
    const long maxval = pnm_next_int(bytes, pos);
    if (maxval < 1 || maxval > 255) throw Error("pnm: unsupported maxval");
    ++pos;  // single whitespace byte after maxval
    if (bytes.size() < pos + static_cast<size_t>(w) * static_cast<size_t>(h))
      throw Error("pnm: pixel data truncated");
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x)
        m.bits(y, x) = bytes[pos + static_cast<size_t>(y * w + x)] > 127;
  } else {
    ++pos;  // single whitespace byte after height
    const long row_bytes = (w + 7) / 8;
    if (bytes.size() < pos + static_cast<size_t>(row_bytes) * static_cast<size_t>(h))
      throw Error("pnm: pixel data truncated");
    for (long y = 0; y < h; ++y) {
      for (long x = 0; x < w; ++x) {
        const uint8_t byte = bytes[pos + static_cast<size_t>(y * row_bytes + x / 8)];
        m.bits(y, x) = (byte >> (7 - x % 8)) & 1;
      }
    }
  }
  return m;
}

ForegroundMask read_mask_file(const std::string& path) {
  try {
    return read_mask(read_all_bytes(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::vector<uint8_t> write_mask_pgm(const ForegroundMask& mask) {
  std::ostringstream header;
  header << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
  const std::string h = header.str();
  std::vector<uint8_t> out(h.begin(), h.end());
  out.reserve(out.size() + static_cast<size_t>(mask.bits.size()));
  for (Eigen::Index y = 0; y < mask.height(); ++y)
    for (Eigen::Index x = 0; x < mask.width(); ++x)
      out.push_back(mask.bits(y, x) ? 255 : 0);
  return out;
}

void write_mask_pgm_file(const ForegroundMask& mask, const std::string& path) {
  write_all_bytes(write_mask_pgm(mask), path);
}

// ---------------------------------------------------------------------------
// Gaussian derivative filtering

Eigen::VectorXd gaussian_derivative_kernel(int size, double sigma, int order) {
  if (size < 3 || size % 2 == 0 || sigma <= 0.0)
    throw InvalidKernelSpec("kernel size must be odd >= 3 and sigma positive");
  if (order != 0 && order != 1) throw InvalidKernelSpec("order must be 0 or 1");
  const int half = (size - 1) / 2;
  Eigen::VectorXd k(size);
  for (int i = 0; i < size; ++i) {
    const double x = i - half;
    k(i) = std::exp(-x * x / (2.0 * sigma * sigma));
  }
  if (order == 0) {
    return k / k.sum();
  }
  // Derivative taps x*G(x), shifted to exact zero sum, then scaled so the
  // correlation response to the ramp f(x) = x is 1.
  for (int i = 0; i < size; ++i) k(i) *= (i - half);
  k.array() -= k.sum() / size;
  double ramp = 0.0;
  for (int i = 0; i < size; ++i) ramp += k(i) * (i - half);
  return k / ramp;
}

Eigen::VectorXd correlate1d(const Eigen::VectorXd& in, const Eigen::VectorXd& kernel) {
  const Eigen::Index n = in.size();
  const Eigen::Index ks = kernel.size();
  const Eigen::Index half = (ks - 1) / 2;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < ks; ++j) {
      Eigen::Index idx = i + j - half;
      if (idx < 0) idx = 0;
      if (idx >= n) idx = n - 1;
      acc += kernel(j) * in(idx);
    }
    out(i) = acc;
  }
  return out;
}

namespace {

// Separable correlation: kx along rows (x axis), ky along columns (y axis).
ScalarField correlate2d(const ScalarField& in, const Eigen::VectorXd& kx,
                        const Eigen::VectorXd& ky) {
  ScalarField tmp(in.rows(), in.cols());
  for (Eigen::Index y = 0; y < in.rows(); ++y)
    tmp.row(y) = correlate1d(in.row(y).transpose(), kx).transpose();
  ScalarField out(in.rows(), in.cols());
  for (Eigen::Index x = 0; x < in.cols(); ++x)
    out.col(x) = correlate1d(tmp.col(x).matrix(), ky);
  return out;
}

}  // namespace

FlowDifferentials differentials(const FlowField& field, const RunConfig& cfg) {
  if (field.width() < cfg.kernel_size || field.height() < cfg.kernel_size)
    throw FieldTooSmall("differentials: field smaller than the filter size");
  const Eigen::VectorXd smooth =
      gaussian_derivative_kernel(cfg.kernel_size, cfg.kernel_sigma, 0);
  const Eigen::VectorXd deriv =
      gaussian_derivative_kernel(cfg.kernel_size, cfg.kernel_sigma, 1);

  const ScalarField u = field.u.cast<double>();
  const ScalarField v = field.v.cast<double>();

  FlowDifferentials d;
  d.gradxx = correlate2d(u, deriv, smooth);   // dFx/dx
  d.gradyy = correlate2d(v, smooth, deriv);   // dFy/dy
  const ScalarField dvdx = correlate2d(v, deriv, smooth);
  const ScalarField dudy = correlate2d(u, smooth, deriv);
  d.div = d.gradxx + d.gradyy;
  d.curl = dvdx - dudy;
  return d;
}

// ---------------------------------------------------------------------------
// Pooling

PoolingDisk pooling_disk(const ForegroundMask& mask) {
  double sx = 0.0, sy = 0.0;
  long count = 0;
  for (Eigen::Index y = 0; y < mask.height(); ++y) {
    for (Eigen::Index x = 0; x < mask.width(); ++x) {
      if (mask.bits(y, x)) {
        sx += static_cast<double>(x);
        sy += static_cast<double>(y);
        ++count;
      }
    }
  }
  if (count == 0) throw EmptyMask("pooling: mask has no foreground pixels");
  PoolingDisk disk;
  disk.cx = sx / static_cast<double>(count);
  disk.cy = sy / static_cast<double>(count);
  disk.radius = std::max(3.0, 0.2 * std::sqrt(static_cast<double>(count)));
  return disk;
}

double pooled_measurement(const ScalarField& field, const PoolingDisk& disk) {
  const double r2 = disk.radius * disk.radius;
  const long x0 = std::max(0L, static_cast<long>(std::floor(disk.cx - disk.radius)));
  const long x1 = std::min(static_cast<long>(field.cols()) - 1,
                           static_cast<long>(std::ceil(disk.cx + disk.radius)));
  const long y0 = std::max(0L, static_cast<long>(std::floor(disk.cy - disk.radius)));
  const long y1 = std::min(static_cast<long>(field.rows()) - 1,
                           static_cast<long>(std::ceil(disk.cy + disk.radius)));
  double acc = 0.0;
  long n = 0;
  for (long y = y0; y <= y1; ++y) {
    for (long x = x0; x <= x1; ++x) {
      const double dx = static_cast<double>(x) - disk.cx;
      const double dy = static_cast<double>(y) - disk.cy;
      if (dx * dx + dy * dy <= r2) {
        acc += field(y, x);
        ++n;
      }
    }
  }
  if (n == 0) throw EmptyMask("pooling: disk contains no pixels");
  return acc / static_cast<double>(n);
}

double pooled_measurement(const ScalarField& field, const ForegroundMask& mask) {
  if (field.rows() != mask.height() || field.cols() != mask.width())
    throw DimensionMismatch("pooling: field and mask dimensions differ");
  return pooled_measurement(field, pooling_disk(mask));
}

ForegroundMask mask_fallback(const ForegroundMask& current,
                             const std::optional<ForegroundMask>& previous) {
  constexpr double kMinFraction = 0.01;
  if (previous &&
      (previous->width() != current.width() || previous->height() != current.height()))
    throw DimensionMismatch("mask_fallback: mask dimensions differ");
  if (current.foreground_fraction() >= kMinFraction) return current;
  if (previous && previous->foreground_fraction() >= kMinFraction) return *previous;
  ForegroundMask full;
  full.bits.setConstant(current.height(), current.width(), true);
  return full;
}

SignalBundle extract_signals(const std::vector<FlowField>& flows,
                             const std::vector<ForegroundMask>& masks,
                             double fps, const RunConfig& cfg) {
  if (flows.size() < 2) throw EmptySequence("extract_signals: need at least 2 frames");
  if (masks.size() != flows.size())
    throw DimensionMismatch("extract_signals: one mask per flow frame required");
  if (!(fps > 0)) throw Error("extract_signals: fps must be positive");
  const Eigen::Index w = flows[0].width();
  const Eigen::Index h = flows[0].height();
  for (size_t i = 0; i < flows.size(); ++i) {
    if (flows[i].width() != w || flows[i].height() != h ||
        masks[i].width() != w || masks[i].height() != h)
      throw DimensionMismatch("extract_signals: inconsistent frame dimensions");
  }

  // The fallback chain is sequential by definition; the effective mask per
  // frame is resolved first, the heavy filtering then runs in parallel.
  const auto n = static_cast<int>(flows.size());
  std::vector<PoolingDisk> disks(static_cast<size_t>(n));
  {
    std::optional<ForegroundMask> effective;
    for (int i = 0; i < n; ++i) {
      ForegroundMask m = mask_fallback(masks[static_cast<size_t>(i)], effective);
      disks[static_cast<size_t>(i)] = pooling_disk(m);
      effective = std::move(m);
    }
  }

  SignalBundle bundle;
  bundle.dt = 1.0 / fps;
  for (auto& ch : bundle.channels) ch.resize(n);

  parallel_for(n, [&](int i) {
    const auto idx = static_cast<size_t>(i);
    const FlowDifferentials d = differentials(flows[idx], cfg);
    const PoolingDisk& disk = disks[idx];
    bundle.channels[0](i) = pooled_measurement(flows[idx].u.cast<double>(), disk);
    bundle.channels[1](i) = pooled_measurement(flows[idx].v.cast<double>(), disk);
    bundle.channels[2](i) = pooled_measurement(d.gradxx, disk);
    bundle.channels[3](i) = pooled_measurement(d.gradyy, disk);
    bundle.channels[4](i) = pooled_measurement(d.div, disk);
    bundle.channels[5](i) = pooled_measurement(d.curl, disk);
  });

  for (const auto& ch : bundle.channels) {
    if (!ch.allFinite()) throw NonFinite("extract_signals: non-finite measurement");
  }
  return bundle;
}

}  // namespace repcount
