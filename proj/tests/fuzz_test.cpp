#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "support.hpp"

using namespace gddx;

namespace {

constexpr int iterations = 10000;

std::string random_bytes(std::mt19937_64 &rng) {
  std::string s(rng() % 200, '\0');
  for (auto &ch : s)
    ch = static_cast<char>(rng() & 0xff);
  return s;
}

std::string mutate(std::string s, std::mt19937_64 &rng,
                   const std::vector<std::string> &tokens) {
  const int edits = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < edits; ++i) {
    const std::size_t pos = s.empty() ? 0 : rng() % (s.size() + 1);
    switch (rng() % 6) {
    case 0:
      if (!s.empty() && pos < s.size())
        s.erase(pos, 1 + rng() % 8);
      break;
    case 1:
      s.insert(pos, 1, static_cast<char>(rng() & 0xff));
      break;
    case 2:
      s.insert(pos, tokens[rng() % tokens.size()]);
      break;
    case 3:
      if (pos < s.size())
        s[pos] = static_cast<char>(rng() & 0xff);
      break;
    case 4: {
      if (s.empty())
        break;
      const auto a = rng() % s.size(), n = rng() % 30;
      s.insert(pos, s.substr(a, n));
      break;
    }
    case 5:
      s.resize(pos);
      break;
    }
  }
  return s;
}

// Feeds random and mutated inputs to `f`; anything but gddx::Error fails.
void fuzz(const std::vector<std::string> &seeds,
          const std::vector<std::string> &tokens,
          const std::function<void(const std::string &)> &f, std::uint64_t s) {
  std::mt19937_64 rng(s);
  int rejected = 0, accepted = 0;
  for (int i = 0; i < iterations; ++i) {
    const auto input = i % 5 == 0 ? random_bytes(rng)
                                  : mutate(seeds[rng() % seeds.size()], rng,
                                           tokens);
    try {
      f(input);
      ++accepted;
    } catch (const Error &) {
      ++rejected;
    } catch (const std::exception &e) {
      FAIL() << "unexpected " << typeid(e).name() << ": " << e.what()
             << "\ninput: " << input;
    }
  }
  EXPECT_GT(rejected, 0);
  EXPECT_GT(accepted, 0);
}

std::vector<std::string> fixture_texts(std::initializer_list<const char *> n) {
  std::vector<std::string> out;
  for (const auto *name : n)
    out.push_back(test::load_fixture(name));
  return out;
}

} // namespace

TEST(Fuzz, ParseGcs) {
  fuzz(fixture_texts({"ninepoint.gcs", "midline.gcs", "varignon.gcs",
                      "isosceles.gcs", "scalene.gcs"}),
       {"point ", "midpoint ", "foot ", "intersect ", "online ", "goal ", "\n",
        " 1e308", " nan", " -0", "#", "cyclic", "eqangle", " A", "\r\n"},
       [](const std::string &s) {
         const auto c = parse_gcs(s);
         parse_gcs(serialize_gcs(c));
       },
       11);
}

TEST(Fuzz, ImportGgb) {
  fuzz(fixture_texts({"midline.xml"}),
       {"<element type=\"point\" label=\"Q\">", "<coords x=\"1\" y=\"2\" z=\"0\"/>",
        "<command name=\"Intersect\">", "<input a0=\"A\" a1=\"B\"/>",
        "</element>", "</command>", "<output a0=\"M\"/>", "Line[A,B]", "&amp;",
        "<!DOCTYPE x [<!ENTITY e \"ee\">]>", "&e;", "<"},
       [](const std::string &s) { import_ggb_subset(s); }, 12);
}

TEST(Fuzz, LoadCatalog) {
  const auto dir = test::data_dir() / "i18n";
  fuzz({read_file(dir / "en.csv"), read_file(dir / "de.csv")},
       {",", "\"", "\"\"", "\n", "\r\n", "#", "99999999999999999999", "-1",
        "\xEF\xBB\xBF", "\xC3"},
       [](const std::string &s) {
         const auto c = load_catalog(s, "xx");
         load_catalog(serialize_catalog(c), "xx");
       },
       13);
}

TEST(Fuzz, LoadRules) {
  fuzz({read_file(test::data_dir() / "rules" / "baseline.rules")},
       {"rule ", "given ", "conclude ", "phrase ", "distinct ", "(", ")", ",",
        "midp", "cyclic", "\n", "name ", "version "},
       [](const std::string &s) { load_rules(s); }, 14);
}

TEST(Fuzz, ParseFact) {
  fuzz({"cyclic D E F G", "eqangle(A,B,C,D,E,F,G,H)", "coll A B C",
        "midp M A B"},
       {" ", "(", ")", ",", "para", "A", "Z9"},
       [](const std::string &s) { parse_fact(s); }, 15);
}
