#ifndef GIFTSMITH_TESTS_FIXTURES_HPP
#define GIFTSMITH_TESTS_FIXTURES_HPP

// Hand-built questions matching the sample listing and the water export.
// Written out field by field so parser tests do not grade themselves.

#include "giftsmith/model.hpp"

namespace giftsmith::testing {

inline Question q1_true_false()
{
    Question q;
    q.title = "Q1";
    q.stem_prefix = "1+1=2";
    q.body = TrueFalseBody{true, std::nullopt, std::nullopt};
    return q;
}

inline Question q2_spectrum()
{
    Question q;
    q.title = "Q2";
    q.stem_prefix = "What's between orange and green in the spectrum?";
    q.body = ChoicesBody{{
        Choice{"yellow", true, std::nullopt, "correct!"},
        Choice{"red", false, std::nullopt, "wrong, it's yellow"},
        Choice{"blue", false, std::nullopt, "wrong, it's yellow"},
    }};
    return q;
}

inline Question q3_two_plus()
{
    Question q;
    q.title = "Q3";
    q.stem_prefix = "Two plus";
    q.stem_suffix = "equals four.";
    q.body = ShortAnswerBody{{
        Choice{"two", true, std::nullopt, std::nullopt},
        Choice{"2", true, std::nullopt, std::nullopt},
    }};
    return q;
}

inline Question q4_animals()
{
    Question q;
    q.title = "Q4";
    q.stem_prefix = "Which animal eats which food?";
    q.body = MatchingBody{{
        MatchPair{"cat", "cat food", std::nullopt},
        MatchPair{"dog", "dog food", std::nullopt},
    }};
    return q;
}

inline Question q5_range()
{
    Question q;
    q.title = "Q5";
    q.stem_prefix = "What is a number from 1 to 5?";
    q.body = NumericBody{{NumericAnswer{NumericPoint{3, 2}, std::nullopt, std::nullopt}}};
    return q;
}

inline Question water(std::optional<std::string> title = std::nullopt)
{
    Question q;
    q.title = std::move(title);
    q.stem_prefix = "Water is a compound of two different elements.";
    q.body = ChoicesBody{{
        Choice{"Nitrogen", false, std::nullopt, std::nullopt},
        Choice{"Oxygen", true, std::nullopt, std::nullopt},
        Choice{"Carbon Di-Oxide", false, std::nullopt, std::nullopt},
        Choice{"Hydrogen", true, std::nullopt, std::nullopt},
    }};
    q.general_feedback = "Oxygen and Hydrogen";
    return q;
}

} // namespace giftsmith::testing

#endif
