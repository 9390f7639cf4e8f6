#include <gtest/gtest.h>

#include "hypcert/word.hpp"

using namespace hypcert;

TEST(Words, ParseAndFormatRoundTrip) {
  word w = words::parse("ab^-1", 2);
  EXPECT_EQ(w, (word{1, -2}));
  EXPECT_EQ(words::format(w, 2), "ab^-1");
  EXPECT_EQ(words::parse("a^3b^-2", 2), (word{1, 1, 1, -2, -2}));
  EXPECT_EQ(words::format(words::parse("a^3b^-2", 2), 2), "a^3b^-2");
  EXPECT_EQ(words::parse("aa^-1b", 2), (word{2}));
  EXPECT_EQ(words::parse("e", 2), word{});
  EXPECT_EQ(words::format(word{}, 2), "e");
}

TEST(Words, ParseRejectsUnknownLetters) {
  EXPECT_THROW(words::parse("ac", 2), input_error);
  EXPECT_THROW(words::parse("a^", 2), input_error);
}

TEST(Words, ReduceInverseMultiply) {
  word u{1, 2, -1};
  EXPECT_EQ(words::multiply(u, words::inverse(u)), word{});
  EXPECT_EQ(words::reduce(word{1, 2, -2, -1, 2}), word{2});
  EXPECT_EQ(words::power(word{1, 2}, 3), (word{1, 2, 1, 2, 1, 2}));
  EXPECT_EQ(words::power(word{1, 2}, -1), (word{-2, -1}));
  EXPECT_EQ(words::power(word{1, 2, -1}, 4), (word{1, 2, 2, 2, 2, -1}));
}

TEST(Words, CyclicReduction) {
  auto s = words::cyclic_reduce(word{1, 2, 2, -1});
  EXPECT_EQ(s.conj, word{1});
  EXPECT_EQ(s.core, (word{2, 2}));
  auto t = words::cyclic_reduce(word{1, 2});
  EXPECT_TRUE(t.conj.empty());
}

TEST(Words, ShortlexOrderUsesInverseAfterLetter) {
  EXPECT_TRUE(words::shortlex_less(word{1}, word{-1}));
  EXPECT_TRUE(words::shortlex_less(word{-1}, word{2}));
  EXPECT_TRUE(words::shortlex_less(word{2}, word{1, 1}));
  EXPECT_FALSE(words::shortlex_less(word{1, 2}, word{1, 2}));
}
