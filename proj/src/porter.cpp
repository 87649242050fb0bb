// Porter stemmer with the original 1980 rule set (step 2 maps
// "abli" -> "able" and has no "logi" rule).

#include "remp/text_sim.hpp"

#include <array>
#include <string>

namespace remp {
namespace {

class Stemmer {
public:
  explicit Stemmer(std::string_view word) : b_(word) {}

  std::string run() {
    if (b_.size() <= 2) return b_;
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return b_;
  }

private:
  std::string b_;

  bool cons(std::size_t i) const {
    switch (b_[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return false;
    case 'y': return i == 0 ? true : !cons(i - 1);
    default: return true;
    }
  }

  // m() of the stem b_[0, len): number of VC sequences
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && cons(i)) ++i;
    while (i < len) {
      while (i < len && !cons(i)) ++i;
      if (i >= len) break;
      while (i < len && cons(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!cons(i)) return true;
    return false;
  }

  bool double_cons(std::size_t len) const {
    return len >= 2 && b_[len - 1] == b_[len - 2] && cons(len - 1);
  }

  // *o: stem ends cvc where the final c is not w, x or y
  bool cvc(std::size_t len) const {
    if (len < 3 || !cons(len - 1) || cons(len - 2) || !cons(len - 3)) return false;
    const char c = b_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) const {
    return b_.size() >= s.size() && std::string_view(b_).substr(b_.size() - s.size()) == s;
  }

  std::size_t stem_len(std::string_view suffix) const { return b_.size() - suffix.size(); }

  void replace_suffix(std::string_view suffix, std::string_view with) {
    b_.resize(stem_len(suffix));
    b_ += with;
  }

  // Applies the first matching rule when the stem measure exceeds `min_m`.
  template <std::size_t N>
  void rules(const std::array<std::pair<std::string_view, std::string_view>, N>& table,
             int min_m) {
    for (const auto& [suffix, with] : table) {
      if (ends(suffix)) {
        if (measure(stem_len(suffix)) > min_m) replace_suffix(suffix, with);
        return;
      }
    }
  }

  void step1a() {
    if (ends("sses")) replace_suffix("sses", "ss");
    else if (ends("ies")) replace_suffix("ies", "i");
    else if (ends("ss")) return;
    else if (ends("s")) replace_suffix("s", "");
  }

  void step1b() {
    if (ends("eed")) {
      if (measure(stem_len("eed")) > 0) replace_suffix("eed", "ee");
      return;
    }
    std::string_view hit;
    if (ends("ed") && has_vowel(stem_len("ed"))) hit = "ed";
    else if (ends("ing") && has_vowel(stem_len("ing"))) hit = "ing";
    if (hit.empty()) return;
    replace_suffix(hit, "");
    if (ends("at")) replace_suffix("at", "ate");
    else if (ends("bl")) replace_suffix("bl", "ble");
    else if (ends("iz")) replace_suffix("iz", "ize");
    else if (double_cons(b_.size())) {
      const char c = b_.back();
      if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
    } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
      b_ += 'e';
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(stem_len("y"))) b_.back() = 'i';
  }

  void step2() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 20> table{{
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},    {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},  {"biliti", "ble"},
    }};
    rules(table, 0);
  }

  void step3() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> table{{
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    }};
    rules(table, 0);
  }

  void step4() {
    static constexpr std::array<std::string_view, 19> suffixes{
        "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
    // longest match wins: "ement" before "ment" before "ent"
    std::string_view hit;
    for (auto s : suffixes)
      if (ends(s) && s.size() > hit.size()) hit = s;
    if (hit.empty()) return;
    const auto len = stem_len(hit);
    if (measure(len) <= 1) return;
    if (hit == "ion" && !(len > 0 && (b_[len - 1] == 's' || b_[len - 1] == 't'))) return;
    b_.resize(len);
  }

  void step5a() {
    if (!ends("e")) return;
    const auto len = stem_len("e");
    const int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len))) b_.pop_back();
  }

  void step5b() {
    if (measure(b_.size()) > 1 && double_cons(b_.size()) && b_.back() == 'l') b_.pop_back();
  }
};

} // namespace

std::string porter_stem(std::string_view word) { return Stemmer(word).run(); }

} // namespace remp
