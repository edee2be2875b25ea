// Copyright 2026 The locos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "locos/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "locos/error.hpp"

namespace locos {
namespace io {

namespace {

static_assert(std::numeric_limits<float>::is_iec559, "requires IEEE-754 floats");

constexpr char kMatrixMagic[4] = {'L', 'C', 'V', '1'};
constexpr char kTemplateMagic[4] = {'L', 'C', 'T', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const unsigned char* p) {
  const std::uint32_t bits = get_u32(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_io("cannot open '" + path.string() + "' for reading");
  }
  return in;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw_io("cannot open '" + path.string() + "' for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw_io("short write to '" + path.string() + "'");
  }
}

std::uint64_t file_size_of(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) {
    throw_io("cannot stat '" + path.string() + "': " + ec.message());
  }
  return size;
}

float checked_narrow(double v, std::size_t index, std::size_t cols,
                     const std::filesystem::path& path) {
  const float f = static_cast<float>(v);
  if (!std::isfinite(f)) {
    throw_data("value at row " + std::to_string(index / cols) + ", col " +
               std::to_string(index % cols) + " cannot be stored in '" +
               path.string() + "' (non-finite or out of float range)");
  }
  return f;
}

}  // namespace

Matrix read_matrix(const std::filesystem::path& path,
                   std::uint64_t max_payload_bytes) {
  const std::uint64_t size = file_size_of(path);
  if (size < 12) {
    throw_format("'" + path.string() + "' is too short to be a matrix file");
  }
  auto in = open_input(path);
  unsigned char header[12];
  in.read(reinterpret_cast<char*>(header), 12);
  if (!in) {
    throw_io("cannot read header of '" + path.string() + "'");
  }
  if (std::memcmp(header, kMatrixMagic, 4) != 0) {
    throw_format("'" + path.string() + "' has the wrong magic (expected LCV1)");
  }
  const std::uint32_t rows = get_u32(header + 4);
  const std::uint32_t cols = get_u32(header + 8);
  const std::uint64_t payload = 4ull * rows * cols;
  if (payload > max_payload_bytes) {
    throw_format("'" + path.string() + "' declares a " + std::to_string(payload) +
                 "-byte payload, above the " + std::to_string(max_payload_bytes) +
                 "-byte cap");
  }
  if (size - 12 != payload) {
    throw_format("'" + path.string() + "' payload is " + std::to_string(size - 12) +
                 " bytes but " + std::to_string(rows) + "x" + std::to_string(cols) +
                 " requires exactly " + std::to_string(payload));
  }

  Matrix matrix(rows, cols);
  constexpr std::size_t kChunkValues = 1 << 16;
  std::vector<unsigned char> buffer(kChunkValues * 4);
  std::size_t index = 0;
  const std::size_t total = static_cast<std::size_t>(rows) * cols;
  while (index < total) {
    const std::size_t n = std::min(kChunkValues, total - index);
    in.read(reinterpret_cast<char*>(buffer.data()),
            static_cast<std::streamsize>(n * 4));
    if (!in) {
      throw_io("unexpected read failure in '" + path.string() + "'");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const float v = get_f32(buffer.data() + 4 * i);
      if (!std::isfinite(v)) {
        const std::size_t at = index + i;
        throw_format("non-finite value at row " + std::to_string(at / cols) +
                     ", col " + std::to_string(at % cols) + " in '" + path.string() +
                     "'");
      }
      matrix.data[index + i] = v;
    }
    index += n;
  }
  return matrix;
}

void write_matrix(const Matrix& matrix, const std::filesystem::path& path) {
  if (matrix.rows > std::numeric_limits<std::uint32_t>::max() ||
      matrix.cols > std::numeric_limits<std::uint32_t>::max()) {
    throw_data("matrix dimensions exceed the file format's 32-bit fields");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw_io("cannot open '" + path.string() + "' for writing");
  }
  std::string header;
  header.append(kMatrixMagic, 4);
  put_u32(header, static_cast<std::uint32_t>(matrix.rows));
  put_u32(header, static_cast<std::uint32_t>(matrix.cols));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::string chunk;
  constexpr std::size_t kChunkValues = 1 << 16;
  const std::size_t total = matrix.rows * matrix.cols;
  for (std::size_t index = 0; index < total;) {
    const std::size_t n = std::min(kChunkValues, total - index);
    chunk.clear();
    chunk.reserve(n * 4);
    for (std::size_t i = 0; i < n; ++i) {
      put_f32(chunk, checked_narrow(matrix.data[index + i], index + i,
                                    std::max<std::size_t>(matrix.cols, 1), path));
    }
    out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    index += n;
  }
  if (!out) {
    throw_io("short write to '" + path.string() + "'");
  }
}

namespace {

const char* role_name(Role role) {
  switch (role) {
    case Role::Gallery:
      return "gallery";
    case Role::Probe:
      return "probe";
    case Role::CohortGallery:
      return "cohort_gallery";
    case Role::CohortProbe:
      return "cohort_probe";
  }
  return "?";
}

Role parse_role(const std::string& text, std::size_t line_no,
                const std::filesystem::path& path) {
  if (text == "gallery") return Role::Gallery;
  if (text == "probe") return Role::Probe;
  if (text == "cohort_gallery") return Role::CohortGallery;
  if (text == "cohort_probe") return Role::CohortProbe;
  throw_protocol("unknown role '" + text + "' at " + path.string() + ":" +
                 std::to_string(line_no));
}

}  // namespace

std::vector<ProtocolRecord> read_protocol_records(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<ProtocolRecord> records;
  std::set<std::pair<Role, std::string>> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  std::size_t cohort_gallery_count = 0, cohort_probe_count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    if (fields.size() != 4) {
      throw_protocol("expected 4 comma-separated fields at " + path.string() + ":" +
                     std::to_string(line_no));
    }
    ProtocolRecord record;
    record.role = parse_role(fields[0], line_no, path);
    record.sample_id = fields[1];
    record.label = fields[2];
    record.ref = fields[3];
    if (record.sample_id.empty()) {
      throw_protocol("empty sample_id at " + path.string() + ":" +
                     std::to_string(line_no));
    }
    if (!seen_ids.insert({record.role, record.sample_id}).second) {
      throw_protocol("duplicate sample_id '" + record.sample_id + "' for role " +
                     role_name(record.role) + " at " + path.string() + ":" +
                     std::to_string(line_no));
    }
    if (record.role == Role::CohortGallery) ++cohort_gallery_count;
    if (record.role == Role::CohortProbe) ++cohort_probe_count;
    records.push_back(std::move(record));
  }
  if (records.empty()) {
    throw_protocol("'" + path.string() + "' contains no protocol records");
  }
  if (cohort_gallery_count != cohort_probe_count) {
    throw_protocol("cohort splits are misaligned in '" + path.string() + "': " +
                   std::to_string(cohort_gallery_count) + " gallery-side vs " +
                   std::to_string(cohort_probe_count) + " probe-side");
  }
  return records;
}

void write_protocol_records(const std::vector<ProtocolRecord>& records,
                            const std::filesystem::path& path) {
  std::string out;
  for (const ProtocolRecord& r : records) {
    out += role_name(r.role);
    out += ',';
    out += r.sample_id;
    out += ',';
    out += r.label;
    out += ',';
    out += r.ref;
    out += '\n';
  }
  write_file(path, out);
}

std::pair<VerificationProtocol, Matrix> resolve_protocol(
    const std::vector<ProtocolRecord>& records, Matrix vectors,
    const std::filesystem::path& base_dir) {
  VerificationProtocol protocol;
  for (const ProtocolRecord& record : records) {
    SampleRef ref;
    ref.id = record.sample_id;
    ref.label = record.label;
    const bool is_row =
        !record.ref.empty() &&
        std::all_of(record.ref.begin(), record.ref.end(),
                    [](unsigned char c) { return std::isdigit(c) != 0; });
    if (is_row) {
      try {
        ref.row = std::stoull(record.ref);
      } catch (const std::exception&) {
        throw_protocol("row reference '" + record.ref + "' of sample '" +
                       record.sample_id + "' is out of range");
      }
      if (ref.row >= vectors.rows) {
        throw_protocol("sample '" + record.sample_id + "' references row " +
                       record.ref + " but the vector matrix has " +
                       std::to_string(vectors.rows) + " rows");
      }
    } else {
      const Matrix loaded = read_matrix(base_dir / record.ref);
      if (loaded.rows != 1) {
        throw_protocol("per-sample file '" + record.ref + "' must hold exactly one row");
      }
      if (vectors.rows == 0 && vectors.cols == 0) {
        vectors.cols = loaded.cols;
      }
      if (loaded.cols != vectors.cols) {
        throw_protocol("per-sample file '" + record.ref + "' has dimension " +
                       std::to_string(loaded.cols) + ", expected " +
                       std::to_string(vectors.cols));
      }
      ref.row = vectors.rows;
      vectors.data.insert(vectors.data.end(), loaded.data.begin(), loaded.data.end());
      vectors.rows += 1;
    }
    switch (record.role) {
      case Role::Gallery:
        protocol.gallery.push_back(std::move(ref));
        break;
      case Role::Probe:
        protocol.probes.push_back(std::move(ref));
        break;
      case Role::CohortGallery:
        protocol.cohort_gallery.push_back(std::move(ref));
        break;
      case Role::CohortProbe:
        protocol.cohort_probe.push_back(std::move(ref));
        break;
    }
  }
  return {std::move(protocol), std::move(vectors)};
}

void write_template(const GalleryTemplate& tpl, const std::filesystem::path& path) {
  const std::size_t k = tpl.selection.indexes.size();
  if (k != tpl.selected_logits.size()) {
    throw_data("template index/value lengths disagree");
  }
  std::string out;
  out.append(kTemplateMagic, 4);
  out.push_back(static_cast<char>(tpl.strategy.kind));
  put_u32(out, static_cast<std::uint32_t>(k));
  put_u32(out, tpl.selection.top);
  put_u32(out, tpl.selection.bottom);
  put_u32(out, tpl.num_classes);
  for (std::uint32_t idx : tpl.selection.indexes) {
    put_u32(out, idx);
  }
  for (std::size_t i = 0; i < k; ++i) {
    put_f32(out, checked_narrow(tpl.selected_logits[i], i, 1, path));
  }
  put_u32(out, static_cast<std::uint32_t>(tpl.source_id.size()));
  out += tpl.source_id;
  write_file(path, out);
}

GalleryTemplate read_template(const std::filesystem::path& path) {
  const std::uint64_t size = file_size_of(path);
  auto in = open_input(path);
  std::string bytes(size, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(size));
  if (!in) {
    throw_io("cannot read '" + path.string() + "'");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (size < 21 || std::memcmp(p, kTemplateMagic, 4) != 0) {
    throw_format("'" + path.string() + "' is not a template file (expected LCT1)");
  }
  const std::uint8_t kind_byte = p[4];
  if (kind_byte > static_cast<std::uint8_t>(SelectionKind::ProbeTopK)) {
    throw_format("unknown selection strategy tag " + std::to_string(kind_byte) +
                 " in '" + path.string() + "'");
  }
  const std::uint32_t k = get_u32(p + 5);
  const std::uint32_t top = get_u32(p + 9);
  const std::uint32_t bottom = get_u32(p + 13);
  const std::uint32_t num_classes = get_u32(p + 17);
  const std::uint64_t fixed = 21ull + 8ull * k + 4ull;
  if (size < fixed) {
    throw_format("'" + path.string() + "' is truncated");
  }
  if (k > num_classes || num_classes > (1u << 27)) {
    throw_format("implausible K/C fields in '" + path.string() + "'");
  }
  GalleryTemplate tpl;
  tpl.strategy.kind = static_cast<SelectionKind>(kind_byte);
  tpl.strategy.k = k;
  tpl.strategy.top = top;
  tpl.strategy.bottom = bottom;
  tpl.num_classes = num_classes;
  tpl.selection.top = top;
  tpl.selection.bottom = bottom;
  tpl.selection.indexes.resize(k);
  tpl.selected_logits.resize(k);
  std::vector<bool> seen(num_classes, false);
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint32_t idx = get_u32(p + 21 + 4ull * i);
    if (idx >= num_classes) {
      throw_format("template index " + std::to_string(idx) +
                   " out of range for C=" + std::to_string(num_classes) + " in '" +
                   path.string() + "'");
    }
    if (seen[idx]) {
      throw_format("duplicate template index " + std::to_string(idx) + " in '" +
                   path.string() + "'");
    }
    seen[idx] = true;
    tpl.selection.indexes[i] = idx;
  }
  const std::size_t values_off = 21 + 4ull * k;
  for (std::uint32_t i = 0; i < k; ++i) {
    const float v = get_f32(p + values_off + 4ull * i);
    if (!std::isfinite(v)) {
      throw_format("non-finite template value at entry " + std::to_string(i) +
                   " in '" + path.string() + "'");
    }
    tpl.selected_logits[i] = v;
  }
  const std::size_t label_off = values_off + 4ull * k;
  const std::uint32_t label_len = get_u32(p + label_off);
  if (size != fixed + label_len) {
    throw_format("'" + path.string() + "' has trailing or missing label bytes");
  }
  tpl.source_id = bytes.substr(label_off + 4, label_len);
  if (static_cast<std::uint64_t>(top) + bottom != k || k == 0 || top == 0) {
    throw_format("inconsistent selection split in '" + path.string() + "'");
  }
  tpl.refresh_norms();
  return tpl;
}

void write_roc_table(const RocCurve& curve, const std::filesystem::path& path) {
  std::string out = "threshold\tfmr\ttmr\n";
  char buf[96];
  for (const RocPoint& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\t%.17g\n", p.threshold, p.fmr, p.tmr);
    out += buf;
  }
  write_file(path, out);
}

Matrix mask_to_matrix(const ScoreMatrix& matrix) {
  Matrix mask(matrix.scores.rows, matrix.scores.cols);
  for (std::size_t i = 0; i < matrix.genuine.size(); ++i) {
    mask.data[i] = matrix.genuine[i] ? 1.0 : 0.0;
  }
  return mask;
}

std::vector<std::uint8_t> mask_from_matrix(const Matrix& mask) {
  std::vector<std::uint8_t> out(mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    if (mask.data[i] == 0.0) {
      out[i] = 0;
    } else if (mask.data[i] == 1.0) {
      out[i] = 1;
    } else {
      throw_format("genuine mask entries must be exactly 0 or 1 (row " +
                   std::to_string(i / std::max<std::size_t>(mask.cols, 1)) + ", col " +
                   std::to_string(i % std::max<std::size_t>(mask.cols, 1)) + ")");
    }
  }
  return out;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::uint64_t hash = 1469598103934665603ull;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof(buffer));
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

}  // namespace io
}  // namespace locos
