#ifndef REPCOUNT_ANNOTATION_HPP_
#define REPCOUNT_ANNOTATION_HPP_

#include <string>
#include <vector>

#include "repcount/errors.hpp"

namespace repcount {

/// Per-video cycle annotation: strictly increasing frame indices of cycle
/// starts; the count is the number of full cycles between them.
struct VideoAnnotation {
  std::string id;
  double fps = 0.0;
  std::vector<long> cycle_bounds;

  long count() const {
    return static_cast<long>(cycle_bounds.size()) - 1;
  }
};

/// JSON schema: {"id": str, "fps": number, "cycle_bounds": [int, ...]}.
/// parse_annotation(format_annotation(a)) == a. Raises BadAnnotation on
/// unsorted or fewer than two bounds.
VideoAnnotation parse_annotation(const std::string& json_text);
std::string format_annotation(const VideoAnnotation& annotation);

VideoAnnotation read_annotation_file(const std::string& path);
void write_annotation_file(const VideoAnnotation& annotation, const std::string& path);

}  // namespace repcount

#endif  // REPCOUNT_ANNOTATION_HPP_
