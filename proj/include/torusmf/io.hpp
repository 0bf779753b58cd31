#pragma once

// CSV and JSON serialization of fields, plus version strings.
//
// Field CSV layout: a header line "n,v-preset", one line with those two
// values, then n rows of n values (row j holds y = j/n, x fastest). A
// one-form stores the c1 block followed by the c2 block.

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "torusmf/field.hpp"

namespace torusmf {

using Json = nlohmann::ordered_json;

struct FieldFile {
  std::size_t n = 0;
  std::string v_preset;
  ScalarField field;
};

struct OneFormFile {
  std::size_t n = 0;
  std::string v_preset;
  OneForm form;
};

void write_field_csv(const std::filesystem::path& path, const ScalarField& f, const std::string& v_preset);
void write_oneform_csv(const std::filesystem::path& path, const OneForm& f, const std::string& v_preset);
// Throws InvalidArgument with the offending line number.
FieldFile read_field_csv(const std::filesystem::path& path);
OneFormFile read_oneform_csv(const std::filesystem::path& path);

// {"kind", "n", "v_preset", "csv", "min", "max", "mean"}; mean is the plain node average.
Json field_descriptor(const ScalarField& f, const std::string& v_preset, const std::string& csv_name);

// Writes `j` pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

// Library, FFTW, Eigen, Boost and compiler versions.
std::map<std::string, std::string> version_info();

}  // namespace torusmf
