#include "metacd/tables.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "metacd/errors.hpp"

namespace metacd {

namespace {

const char* const kColumns[5] = {"study", "n_control", "events_control",
                                 "n_treatment", "events_treatment"};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::int64_t parse_count(const std::string& cell, const char* column,
                         std::size_t line_no) {
  std::int64_t value = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    std::ostringstream msg;
    msg << "row " << line_no << ": value '" << cell << "' in column " << column
        << " is not an integer";
    throw InputError(msg.str());
  }
  return value;
}

}  // namespace

StudyTable make_study(std::string id, std::int64_t control_size,
                      std::int64_t control_events, std::int64_t treatment_size,
                      std::int64_t treatment_events, double divisor) {
  if (id.empty()) throw InputError("study id must be non-empty");
  if (!(divisor > 0.0) || !std::isfinite(divisor))
    throw InputError("divisor must be a positive real");
  if (control_size < 1 || treatment_size < 1)
    throw InputError("study " + id + ": group sizes must be at least 1");
  if (control_events < 0 || treatment_events < 0)
    throw InputError("study " + id + ": event counts must be nonnegative");
  if (control_events > control_size) {
    std::ostringstream msg;
    msg << "study " << id << ": events_control (" << control_events
        << ") exceeds n_control (" << control_size << ")";
    throw InputError(msg.str());
  }
  if (treatment_events > treatment_size) {
    std::ostringstream msg;
    msg << "study " << id << ": events_treatment (" << treatment_events
        << ") exceeds n_treatment (" << treatment_size << ")";
    throw InputError(msg.str());
  }
  StudyTable s;
  s.id = std::move(id);
  s.control_size = control_size;
  s.control_events = control_events;
  s.treatment_size = treatment_size;
  s.treatment_events = treatment_events;
  s.control_exposure = static_cast<double>(control_size) / divisor;
  s.treatment_exposure = static_cast<double>(treatment_size) / divisor;
  return s;
}

StudySet::StudySet(std::vector<StudyTable> studies, double divisor)
    : studies_(std::move(studies)), divisor_(divisor) {
  if (studies_.empty()) throw InputError("a study set needs at least one study");
  if (!(divisor_ > 0.0) || !std::isfinite(divisor_))
    throw InputError("divisor must be a positive real");
  std::unordered_set<std::string> seen;
  for (auto& s : studies_) {
    if (!seen.insert(s.id).second)
      throw InputError("duplicate study id '" + s.id + "'");
    // Re-derive exposures so the set invariant holds whatever the caller built.
    s = make_study(s.id, s.control_size, s.control_events, s.treatment_size,
                   s.treatment_events, divisor_);
  }
}

std::size_t StudySet::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < studies_.size(); ++i)
    if (studies_[i].id == id) return i;
  throw InputError("no study with id '" + std::string(id) + "'");
}

std::int64_t StudySet::total_treatment_events() const {
  std::int64_t n = 0;
  for (const auto& s : studies_) n += s.treatment_events;
  return n;
}

std::int64_t StudySet::total_control_events() const {
  std::int64_t n = 0;
  for (const auto& s : studies_) n += s.control_events;
  return n;
}

StudySet read_csv(std::istream& in, const std::string& name, double divisor) {
  std::vector<StudyTable> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_fields(line);
    if (!header_seen) {
      for (std::size_t i = 0; i < 5; ++i) {
        if (i >= fields.size())
          throw InputError(name + ": missing column '" + kColumns[i] + "'");
        if (fields[i] != kColumns[i])
          throw InputError(name + ": expected column '" + kColumns[i] +
                           "', found '" + fields[i] + "'");
      }
      if (fields.size() > 5)
        throw InputError(name + ": unexpected column '" + fields[5] + "'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) {
      std::ostringstream msg;
      msg << name << ": row " << line_no << " has " << fields.size()
          << " fields, expected 5";
      throw InputError(msg.str());
    }
    rows.push_back(make_study(fields[0], parse_count(fields[1], kColumns[1], line_no),
                              parse_count(fields[2], kColumns[2], line_no),
                              parse_count(fields[3], kColumns[3], line_no),
                              parse_count(fields[4], kColumns[4], line_no), divisor));
  }
  if (!header_seen) throw InputError(name + ": missing header row");
  if (rows.empty()) throw InputError(name + ": no data rows");
  return StudySet(std::move(rows), divisor);
}

StudySet load_csv(const std::string& path, double divisor) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in, path, divisor);
}

void write_csv(const StudySet& set, std::ostream& out) {
  out << kColumns[0];
  for (int i = 1; i < 5; ++i) out << ',' << kColumns[i];
  out << '\n';
  for (const auto& s : set.studies()) {
    out << s.id << ',' << s.control_size << ',' << s.control_events << ','
        << s.treatment_size << ',' << s.treatment_events << '\n';
  }
}

void save_csv(const StudySet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_csv(set, out);
}

}  // namespace metacd
