#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cbctt {

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

struct Course {
  std::string id;
  std::string teacher;
  int n_lectures = 1;
  int min_working_days = 1;
  int n_students = 0;
};

struct Room {
  std::string id;
  int capacity = 0;
};

struct Curriculum {
  std::string id;
  std::vector<int> course_indices;
};

struct Unavailability {
  int course = 0;
  int day = 0;
  int timeslot = 0;

  friend bool operator<(const Unavailability& a, const Unavailability& b) {
    return std::tie(a.course, a.day, a.timeslot) < std::tie(b.course, b.day, b.timeslot);
  }
  friend bool operator==(const Unavailability& a, const Unavailability& b) {
    return std::tie(a.course, a.day, a.timeslot) == std::tie(b.course, b.day, b.timeslot);
  }
};

/// Immutable problem definition. Fill the declaration fields, then call
/// finalize() once; it checks the invariants and builds the dense lookup
/// tables (id maps, availability, conflict relation, lecture index).
class Instance {
 public:
  std::string name;
  int n_days = 0;
  int periods_per_day = 0;
  std::vector<Course> courses;
  std::vector<Room> rooms;
  std::vector<Curriculum> curricula;
  std::vector<Unavailability> unavailabilities;

  void finalize(std::vector<std::string>* warnings = nullptr);

  int n_periods() const { return n_periods_; }
  int n_courses() const { return static_cast<int>(courses.size()); }
  int n_rooms() const { return static_cast<int>(rooms.size()); }
  int n_curricula() const { return static_cast<int>(curricula.size()); }
  int total_lectures() const { return total_lectures_; }

  int day_of(int period) const { return period / periods_per_day; }
  int slot_of(int period) const { return period % periods_per_day; }
  int period(int day, int slot) const { return day * periods_per_day + slot; }

  int course_of_lecture(int lecture) const { return lecture_course_[lecture]; }
  int first_lecture(int course) const { return first_lecture_[course]; }

  bool available(int course, int period) const {
    return available_[static_cast<std::size_t>(course) * n_periods_ + period] != 0;
  }
  const std::vector<int>& available_periods(int course) const {
    return available_periods_[course];
  }

  bool conflict(int a, int b) const {
    return conflict_[static_cast<std::size_t>(a) * courses.size() + b] != 0;
  }
  const std::vector<int>& conflict_neighbors(int course) const {
    return conflict_adj_[course];
  }
  const std::vector<int>& curricula_of(int course) const {
    return course_curricula_[course];
  }

  int course_index(const std::string& id) const {
    auto it = course_ids_.find(id);
    return it == course_ids_.end() ? -1 : it->second;
  }
  int room_index(const std::string& id) const {
    auto it = room_ids_.find(id);
    return it == room_ids_.end() ? -1 : it->second;
  }
  int curriculum_index(const std::string& id) const {
    auto it = curriculum_ids_.find(id);
    return it == curriculum_ids_.end() ? -1 : it->second;
  }

  /// Lectures fit in rooms x periods with room to spare; the MoveLecture
  /// empty-room restriction applies only in that regime.
  bool under_full_occupancy() const {
    return total_lectures_ < n_rooms() * n_periods_;
  }

 private:
  int n_periods_ = 0;
  int total_lectures_ = 0;
  std::vector<int> lecture_course_;
  std::vector<int> first_lecture_;
  std::vector<unsigned char> available_;
  std::vector<std::vector<int>> available_periods_;
  std::vector<unsigned char> conflict_;
  std::vector<std::vector<int>> conflict_adj_;
  std::vector<std::vector<int>> course_curricula_;
  std::unordered_map<std::string, int> course_ids_;
  std::unordered_map<std::string, int> room_ids_;
  std::unordered_map<std::string, int> curriculum_ids_;
};

inline void Instance::finalize(std::vector<std::string>* warnings) {
  if (n_days < 1 || periods_per_day < 1) {
    throw std::invalid_argument("instance needs at least one day and one timeslot per day");
  }
  n_periods_ = n_days * periods_per_day;

  const int nc = n_courses();
  course_ids_.clear();
  room_ids_.clear();
  curriculum_ids_.clear();
  for (int c = 0; c < nc; ++c) {
    const Course& course = courses[c];
    if (course.n_lectures < 1) {
      throw std::invalid_argument("course " + course.id + ": lecture count must be >= 1");
    }
    if (course.min_working_days < 1) {
      throw std::invalid_argument("course " + course.id + ": min working days must be >= 1");
    }
    if (course.n_students < 0) {
      throw std::invalid_argument("course " + course.id + ": negative student count");
    }
    if (!course_ids_.emplace(course.id, c).second) {
      throw std::invalid_argument("duplicate course id " + course.id);
    }
  }
  for (int r = 0; r < n_rooms(); ++r) {
    if (rooms[r].capacity < 0) {
      throw std::invalid_argument("room " + rooms[r].id + ": negative capacity");
    }
    if (!room_ids_.emplace(rooms[r].id, r).second) {
      throw std::invalid_argument("duplicate room id " + rooms[r].id);
    }
  }
  for (int q = 0; q < n_curricula(); ++q) {
    if (!curriculum_ids_.emplace(curricula[q].id, q).second) {
      throw std::invalid_argument("duplicate curriculum id " + curricula[q].id);
    }
    std::set<int> seen;
    for (int c : curricula[q].course_indices) {
      if (c < 0 || c >= nc) {
        throw std::invalid_argument("curriculum " + curricula[q].id + ": bad course index");
      }
      if (!seen.insert(c).second) {
        throw std::invalid_argument("curriculum " + curricula[q].id + ": duplicate course " +
                                    courses[c].id);
      }
    }
  }

  // Lecture index: lectures of a course are contiguous, courses in order.
  total_lectures_ = 0;
  first_lecture_.assign(nc, 0);
  lecture_course_.clear();
  for (int c = 0; c < nc; ++c) {
    first_lecture_[c] = total_lectures_;
    total_lectures_ += courses[c].n_lectures;
    lecture_course_.insert(lecture_course_.end(), courses[c].n_lectures, c);
  }

  // Availability; duplicate unavailability rows are tolerated and dropped.
  for (const Unavailability& u : unavailabilities) {
    if (u.course < 0 || u.course >= nc) {
      throw std::invalid_argument("unavailability: bad course index");
    }
    if (u.day < 0 || u.day >= n_days || u.timeslot < 0 || u.timeslot >= periods_per_day) {
      throw std::invalid_argument("unavailability for " + courses[u.course].id +
                                  ": day/timeslot out of range");
    }
  }
  {
    std::vector<Unavailability> unique = unavailabilities;
    std::sort(unique.begin(), unique.end());
    auto last = std::unique(unique.begin(), unique.end());
    if (last != unique.end()) {
      std::size_t dropped = static_cast<std::size_t>(unique.end() - last);
      unique.erase(last, unique.end());
      if (warnings != nullptr) {
        warnings->push_back("dropped " + std::to_string(dropped) +
                            " duplicate unavailability constraint(s)");
      }
    }
    unavailabilities = std::move(unique);
  }
  available_.assign(static_cast<std::size_t>(nc) * n_periods_, 1);
  for (const Unavailability& u : unavailabilities) {
    available_[static_cast<std::size_t>(u.course) * n_periods_ + period(u.day, u.timeslot)] = 0;
  }
  available_periods_.assign(nc, {});
  for (int c = 0; c < nc; ++c) {
    for (int p = 0; p < n_periods_; ++p) {
      if (available(c, p)) available_periods_[c].push_back(p);
    }
  }

  // Conflict relation: shared curriculum or same teacher. Symmetric,
  // irreflexive.
  conflict_.assign(static_cast<std::size_t>(nc) * nc, 0);
  course_curricula_.assign(nc, {});
  for (int q = 0; q < n_curricula(); ++q) {
    const auto& members = curricula[q].course_indices;
    for (std::size_t i = 0; i < members.size(); ++i) {
      course_curricula_[members[i]].push_back(q);
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        conflict_[static_cast<std::size_t>(members[i]) * nc + members[j]] = 1;
        conflict_[static_cast<std::size_t>(members[j]) * nc + members[i]] = 1;
      }
    }
  }
  for (int a = 0; a < nc; ++a) {
    for (int b = a + 1; b < nc; ++b) {
      if (courses[a].teacher == courses[b].teacher) {
        conflict_[static_cast<std::size_t>(a) * nc + b] = 1;
        conflict_[static_cast<std::size_t>(b) * nc + a] = 1;
      }
    }
  }
  conflict_adj_.assign(nc, {});
  for (int a = 0; a < nc; ++a) {
    for (int b = 0; b < nc; ++b) {
      if (a != b && conflict(a, b)) conflict_adj_[a].push_back(b);
    }
  }
}

/// All unordered course pairs (a < b) that may not share a period.
inline std::vector<std::pair<int, int>> conflict_pairs(const Instance& inst) {
  std::vector<std::pair<int, int>> pairs;
  const int nc = inst.n_courses();
  for (int a = 0; a < nc; ++a) {
    for (int b = a + 1; b < nc; ++b) {
      if (inst.conflict(a, b)) pairs.emplace_back(a, b);
    }
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Instance screening
// ---------------------------------------------------------------------------

struct Finding {
  enum class Kind { ProvablyInfeasible, UnrealisticRoomEndowment };
  Kind kind;
  int course;
  std::string message;
};

/// Screens for the two statically detectable degenerate classes: a course
/// with more lectures than periods it may use, and a course larger than
/// every room. Findings, not failures.
inline std::vector<Finding> validate_instance(const Instance& inst) {
  std::vector<Finding> findings;
  int max_capacity = 0;
  for (const Room& r : inst.rooms) max_capacity = std::max(max_capacity, r.capacity);
  for (int c = 0; c < inst.n_courses(); ++c) {
    const Course& course = inst.courses[c];
    const int avail = static_cast<int>(inst.available_periods(c).size());
    if (avail < course.n_lectures) {
      findings.push_back({Finding::Kind::ProvablyInfeasible, c,
                          "course " + course.id + " has " + std::to_string(course.n_lectures) +
                              " lectures but only " + std::to_string(avail) +
                              " available periods"});
    }
    if (course.n_students > max_capacity) {
      findings.push_back({Finding::Kind::UnrealisticRoomEndowment, c,
                          "course " + course.id + " has " + std::to_string(course.n_students) +
                              " students but the largest room seats " +
                              std::to_string(max_capacity)});
    }
  }
  return findings;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

namespace detail {

/// Whitespace tokenizer that tracks line numbers for error reporting.
class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  bool next(std::string& tok) {
    tok.clear();
    int ch;
    while ((ch = in_.get()) != EOF) {
      if (ch == '\n') {
        ++line_;
      } else if (!std::isspace(static_cast<unsigned char>(ch))) {
        break;
      }
    }
    if (ch == EOF) return false;
    token_line_ = line_;
    tok.push_back(static_cast<char>(ch));
    while ((ch = in_.get()) != EOF && !std::isspace(static_cast<unsigned char>(ch))) {
      tok.push_back(static_cast<char>(ch));
    }
    if (ch == '\n') ++line_;
    return true;
  }

  std::string expect_token(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(line_, std::string("unexpected end of file, expected ") + what);
    return tok;
  }

  void expect_keyword(const std::string& kw) {
    std::string tok = expect_token(kw.c_str());
    if (tok != kw) throw ParseError(token_line_, "expected '" + kw + "', got '" + tok + "'");
  }

  int expect_int(const char* what, int min_value = 0) {
    std::string tok = expect_token(what);
    std::size_t pos = 0;
    long value = 0;
    try {
      value = std::stol(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size()) {
      throw ParseError(token_line_, std::string("expected integer for ") + what + ", got '" + tok + "'");
    }
    if (value < min_value) {
      throw ParseError(token_line_, std::string(what) + " must be >= " + std::to_string(min_value));
    }
    return static_cast<int>(value);
  }

  int token_line() const { return token_line_; }
  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 1;
  int token_line_ = 1;
};

inline bool is_section_keyword(const std::string& tok) {
  return tok == "COURSES:" || tok == "ROOMS:" || tok == "CURRICULA:" ||
         tok == "UNAVAILABILITY_CONSTRAINTS:" || tok == "END.";
}

}  // namespace detail

/// Parses the ITC-2007 curriculum timetabling text format.
inline Instance parse_ctt(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  detail::Tokenizer tok(in);
  Instance inst;

  tok.expect_keyword("Name:");
  inst.name = tok.expect_token("instance name");
  tok.expect_keyword("Courses:");
  const int n_courses = tok.expect_int("Courses");
  tok.expect_keyword("Rooms:");
  const int n_rooms = tok.expect_int("Rooms");
  tok.expect_keyword("Days:");
  inst.n_days = tok.expect_int("Days", 1);
  tok.expect_keyword("Periods_per_day:");
  inst.periods_per_day = tok.expect_int("Periods_per_day", 1);
  tok.expect_keyword("Curricula:");
  const int n_curricula = tok.expect_int("Curricula");
  tok.expect_keyword("Constraints:");
  const int n_constraints = tok.expect_int("Constraints");

  auto row_start = [&tok](const char* section, int row, int declared) {
    std::string t = tok.expect_token(section);
    if (detail::is_section_keyword(t)) {
      throw ParseError(tok.token_line(),
                       std::string(section) + " declares " + std::to_string(declared) +
                           " rows but section ends after " + std::to_string(row));
    }
    return t;
  };

  tok.expect_keyword("COURSES:");
  std::unordered_map<std::string, int> course_index;
  for (int i = 0; i < n_courses; ++i) {
    Course c;
    c.id = row_start("COURSES:", i, n_courses);
    c.teacher = tok.expect_token("teacher");
    c.n_lectures = tok.expect_int("lecture count", 1);
    c.min_working_days = tok.expect_int("min working days", 1);
    c.n_students = tok.expect_int("student count");
    if (!course_index.emplace(c.id, i).second) {
      throw ParseError(tok.token_line(), "duplicate course id " + c.id);
    }
    inst.courses.push_back(std::move(c));
  }

  tok.expect_keyword("ROOMS:");
  for (int i = 0; i < n_rooms; ++i) {
    Room r;
    r.id = row_start("ROOMS:", i, n_rooms);
    r.capacity = tok.expect_int("room capacity");
    inst.rooms.push_back(std::move(r));
  }

  tok.expect_keyword("CURRICULA:");
  for (int i = 0; i < n_curricula; ++i) {
    Curriculum q;
    q.id = row_start("CURRICULA:", i, n_curricula);
    const int members = tok.expect_int("curriculum course count");
    for (int j = 0; j < members; ++j) {
      const std::string cid = tok.expect_token("course id");
      auto it = course_index.find(cid);
      if (it == course_index.end()) {
        throw ParseError(tok.token_line(),
                         "curriculum " + q.id + " references undeclared course " + cid);
      }
      q.course_indices.push_back(it->second);
    }
    inst.curricula.push_back(std::move(q));
  }

  tok.expect_keyword("UNAVAILABILITY_CONSTRAINTS:");
  for (int i = 0; i < n_constraints; ++i) {
    Unavailability u;
    const std::string cid = row_start("UNAVAILABILITY_CONSTRAINTS:", i, n_constraints);
    auto it = course_index.find(cid);
    if (it == course_index.end()) {
      throw ParseError(tok.token_line(), "unavailability references undeclared course " + cid);
    }
    u.course = it->second;
    u.day = tok.expect_int("day");
    u.timeslot = tok.expect_int("timeslot");
    if (u.day >= inst.n_days) {
      throw ParseError(tok.token_line(), "day " + std::to_string(u.day) + " out of range");
    }
    if (u.timeslot >= inst.periods_per_day) {
      throw ParseError(tok.token_line(), "timeslot " + std::to_string(u.timeslot) + " out of range");
    }
    inst.unavailabilities.push_back(u);
  }

  tok.expect_keyword("END.");

  try {
    inst.finalize(warnings);
  } catch (const std::invalid_argument& e) {
    throw ParseError(tok.line(), e.what());
  }
  return inst;
}

inline Instance parse_ctt(const std::string& text, std::vector<std::string>* warnings = nullptr) {
  std::istringstream in(text);
  return parse_ctt(in, warnings);
}

/// Canonical emission of the same format; parse_ctt(format_ctt(x)) is
/// structurally equal to x.
inline std::string format_ctt(const Instance& inst) {
  std::ostringstream out;
  out << "Name: " << inst.name << "\n";
  out << "Courses: " << inst.n_courses() << "\n";
  out << "Rooms: " << inst.n_rooms() << "\n";
  out << "Days: " << inst.n_days << "\n";
  out << "Periods_per_day: " << inst.periods_per_day << "\n";
  out << "Curricula: " << inst.n_curricula() << "\n";
  out << "Constraints: " << inst.unavailabilities.size() << "\n\n";
  out << "COURSES:\n";
  for (const Course& c : inst.courses) {
    out << c.id << " " << c.teacher << " " << c.n_lectures << " " << c.min_working_days << " "
        << c.n_students << "\n";
  }
  out << "\nROOMS:\n";
  for (const Room& r : inst.rooms) {
    out << r.id << " " << r.capacity << "\n";
  }
  out << "\nCURRICULA:\n";
  for (const Curriculum& q : inst.curricula) {
    out << q.id << " " << q.course_indices.size();
    for (int c : q.course_indices) out << " " << inst.courses[c].id;
    out << "\n";
  }
  out << "\nUNAVAILABILITY_CONSTRAINTS:\n";
  for (const Unavailability& u : inst.unavailabilities) {
    out << inst.courses[u.course].id << " " << u.day << " " << u.timeslot << "\n";
  }
  out << "\nEND.\n";
  return out.str();
}

}  // namespace cbctt
