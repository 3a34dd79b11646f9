#pragma once

// Random members of the clustering / co-clustering query family, written as
// query text so the parser is exercised along the way.

#include <random>
#include <string>
#include <vector>

#include "support.hpp"

namespace query_family
{

struct Instance
{
    std::string text;
    patmine::Query query;
};

inline Instance random_query(std::mt19937& rng, int max_items)
{
    auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    auto upto = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    const int k = upto(1, 3);
    std::vector<std::string> parts;

    // the oracle universe is all itemsets for unconstrained variables, so
    // keep those rare and only with few variables
    const bool all_closed = k == 3 || max_items > 6 || chance(0.85);
    if (all_closed)
        parts.push_back("forall i in 1..k: closed(X[i])");
    else
        for (int i = 2; i <= k; ++i)
            parts.push_back("closed(X[" + std::to_string(i) + "])");

    if (chance(0.6))
        parts.push_back("coverTransactions([X[1..k]])");
    switch (upto(0, 2))
    {
    case 1: parts.push_back("forall i < j: overlapTransactions(X[i], X[j]) = 0"); break;
    case 2: parts.push_back("forall i < j: overlapTransactions(X[i], X[j]) <= $deltaT"); break;
    default: break;
    }
    if (chance(0.3))
        parts.push_back("coverItems([X[1..k]])");
    switch (upto(0, 3))
    {
    case 1: parts.push_back("forall i < j: overlapItems(X[i], X[j]) = 0"); break;
    case 2: parts.push_back("forall i < j: overlapItems(X[i], X[j]) <= $deltaI"); break;
    case 3: parts.push_back("forall i < j: overlapItems(X[j], X[i]) < 2"); break;
    default: break;
    }
    if (chance(0.6))
        parts.push_back("canonical([X[1..k]])");
    if (chance(0.3))
        parts.push_back("forall i in 1..k: freq(X[i]) >= $minfr");
    if (chance(0.2))
        parts.push_back("forall i in 1..k: size(X[i]) >= " + std::to_string(upto(1, 3)));
    if (chance(0.15))
        parts.push_back("freq(X[1]) * size(X[1]) > " + std::to_string(upto(1, 6)));
    if (chance(0.15))
        parts.push_back("(size(X[1]) >= 2 or freq(X[k]) >= 3)");
    if (k >= 2 && chance(0.1))
        parts.push_back("X[1] inter X[2] = X[2] inter X[1] and X[1] != X[2]");
    if (chance(0.05))
        parts.push_back("3 > 4");

    std::string text = "query R(k=" + std::to_string(k) + ") := ";
    for (std::size_t i = 0; i < parts.size(); ++i)
        text += (i ? " and " : "") + parts[i];
    text += ";";

    Instance out{text, support::query_from_text(text)};
    out.query.params["deltaT"] = upto(0, 2);
    out.query.params["deltaI"] = upto(0, 2);
    out.query.params["minfr"] = upto(1, 3);
    return out;
}

} // namespace query_family
