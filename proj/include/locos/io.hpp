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
//
// File formats (all little-endian, values quantized to 32-bit IEEE floats):
//
//   matrix  "LCV1" | rows u32 | cols u32 | rows*cols f32, row-major
//   template "LCT1" | kind u8 | K u32 | T u32 | B u32 | C u32
//            | K index u32 | K value f32 | label length u32 | label bytes
//   protocol text, one record per line:
//            role,sample_id,identity_label,path_or_row
//            role in {gallery, probe, cohort_gallery, cohort_probe};
//            '#' starts a comment; blank lines are skipped
//   roc      text table: "threshold<TAB>fmr<TAB>tmr" header, one point per
//            line, thresholds descending

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "locos/eval.hpp"
#include "locos/linalg.hpp"
#include "locos/pipeline.hpp"
#include "locos/selection.hpp"

namespace locos {
namespace io {

// Refuse to allocate for any matrix payload larger than this unless the
// caller raises the cap. Sized so a 617'970 x 512 float weight matrix loads.
inline constexpr std::uint64_t kDefaultMatrixPayloadCap = 2ull << 30;

Matrix read_matrix(const std::filesystem::path& path,
                   std::uint64_t max_payload_bytes = kDefaultMatrixPayloadCap);
void write_matrix(const Matrix& matrix, const std::filesystem::path& path);

enum class Role { Gallery, Probe, CohortGallery, CohortProbe };

struct ProtocolRecord {
  Role role;
  std::string sample_id;
  std::string label;
  std::string ref;  // decimal row index into the vector matrix, or a matrix
                    // file path (single row) relative to the protocol file
};

std::vector<ProtocolRecord> read_protocol_records(const std::filesystem::path& path);
void write_protocol_records(const std::vector<ProtocolRecord>& records,
                            const std::filesystem::path& path);

// Resolve records against a vector matrix: row references index into it
// directly; path references are loaded and appended. Returns the protocol
// and the (possibly extended) matrix.
std::pair<VerificationProtocol, Matrix> resolve_protocol(
    const std::vector<ProtocolRecord>& records, Matrix vectors,
    const std::filesystem::path& base_dir);

void write_template(const GalleryTemplate& tpl, const std::filesystem::path& path);
GalleryTemplate read_template(const std::filesystem::path& path);

void write_roc_table(const RocCurve& curve, const std::filesystem::path& path);

// Genuine masks travel as 0/1 matrices next to their score matrix.
Matrix mask_to_matrix(const ScoreMatrix& matrix);
std::vector<std::uint8_t> mask_from_matrix(const Matrix& mask);

// FNV-1a; used for input digests in run manifests.
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

}  // namespace io
}  // namespace locos
