#ifndef LEVYCB_IO_HPP
#define LEVYCB_IO_HPP

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "levycb/models.hpp"
#include "levycb/pricing.hpp"

namespace levycb {

using Json = nlohmann::json;

// --- JSON descriptors -------------------------------------------------------

Json jump_spec_to_json(const JumpSpec& s);
JumpSpec jump_spec_from_json(const Json& j);

Json triplet_to_json(const LevyTriplet& t);
LevyTriplet triplet_from_json(const Json& j);

Json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const Json& j);

// --- CSV formats -------------------------------------------------------------

// Codebook surface: "T,u,re,im" rows, row-major in T then u; grid and time in
// a JSON sidecar.
void write_codebook_csv(const CodebookSurface& s, const std::filesystem::path& csv,
                        const std::filesystem::path& sidecar);
CodebookSurface read_codebook_csv(const std::filesystem::path& csv,
                                  const std::filesystem::path& sidecar);

// Price surface: "T,K,C"; spot in a JSON sidecar.
void write_price_csv(const PriceSurface& p, const std::filesystem::path& csv,
                     const std::filesystem::path& sidecar);
PriceSurface read_price_csv(const std::filesystem::path& csv,
                            const std::filesystem::path& sidecar);

// Modified slices: "T,x,O".
void write_modified_csv(const std::vector<ModifiedPriceSlice>& slices,
                        const std::filesystem::path& csv);

// Atomic text write: temp file in the target directory, then rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// --- Config ------------------------------------------------------------------

// Parses with a line/column anchor on syntax errors and rejects unknown keys.
Json parse_config_file(const std::filesystem::path& path);
void require_keys(const Json& j, std::initializer_list<const char*> allowed,
                  const std::string& context);

struct ParsedModel {
  std::string kind;           // bs | pii | affine | bns
  GridSpec grid;
  double x0 = 0.0;
  BuildingBlocks blocks;
  std::optional<BnsParams> bns;  // set for every kind (zero driver for bs/pii)
  // Closed-form cumulant int_0^T psi0(r, z) dr on the strip, when available.
  std::function<Complex(double, Complex)> cumulant0;
};

ParsedModel parse_model(const Json& j);

}  // namespace levycb

#endif
