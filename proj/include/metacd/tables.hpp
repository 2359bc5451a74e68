#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace metacd {

/// One 2x2 study: arm sizes, event counts and the derived exposures.
/// The exposure of an arm is its size divided by the set-wide divisor,
/// so event rates are expressed per `divisor` patients.
struct StudyTable {
  std::string id;
  std::int64_t control_size = 0;
  std::int64_t control_events = 0;
  std::int64_t treatment_size = 0;
  std::int64_t treatment_events = 0;
  double control_exposure = 0.0;
  double treatment_exposure = 0.0;

  /// Total event count z; the conditioning statistic for this study.
  std::int64_t event_total() const { return control_events + treatment_events; }

  bool operator==(const StudyTable&) const = default;
};

/// Builds a study and checks the count invariants. Throws InputError.
StudyTable make_study(std::string id, std::int64_t control_size,
                      std::int64_t control_events, std::int64_t treatment_size,
                      std::int64_t treatment_events, double divisor = 100.0);

/// Ordered, immutable collection of studies sharing one exposure divisor.
class StudySet {
 public:
  StudySet(std::vector<StudyTable> studies, double divisor = 100.0);

  const std::vector<StudyTable>& studies() const { return studies_; }
  double divisor() const { return divisor_; }
  std::size_t size() const { return studies_.size(); }
  const StudyTable& operator[](std::size_t i) const { return studies_[i]; }

  /// Position of the study with the given id; throws InputError if absent.
  std::size_t index_of(std::string_view id) const;

  std::int64_t total_treatment_events() const;
  std::int64_t total_control_events() const;

 private:
  std::vector<StudyTable> studies_;
  double divisor_;
};

/// Reads `study,n_control,events_control,n_treatment,events_treatment` CSV.
/// Lines starting with '#' are skipped; LF and CRLF both accepted.
StudySet load_csv(const std::string& path, double divisor = 100.0);

/// Same parser on an already-open stream; `name` is used in error messages.
StudySet read_csv(std::istream& in, const std::string& name, double divisor = 100.0);

void write_csv(const StudySet& set, std::ostream& out);
void save_csv(const StudySet& set, const std::string& path);

}  // namespace metacd
