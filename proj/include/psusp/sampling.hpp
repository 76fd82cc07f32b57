#pragma once

/// Cylinder enumeration and sampling helpers shared by the suspension
/// estimators. A "central block of depth m" is the word on indices |i| < m.

#include <vector>

#include <boost/random/mersenne_twister.hpp>

#include "psusp/cantor.hpp"

namespace psusp::sampling {

using Rng = boost::random::mt19937_64;

/// Smallest m with 2^-m < radius.
int strict_depth(double radius);

cantor::Word central_block(const cantor::SymbolSequence& c, int m);

/// Every central block of depth m that occurs in the system's language.
std::vector<cantor::Word> central_words(const cantor::CantorSystem& sys, int m);

/// A point agreeing with `center` on |i| < m and random (but admissible)
/// on the rest of [-span, span].
cantor::SymbolSequence sample_cylinder(const cantor::CantorSystem& sys, const cantor::SymbolSequence& center, int m,
                                       int span, Rng& rng);

/// Points agreeing with `anchor` on |i| < m whose symbols on the indices
/// exposed by windings in [w_lo, w_hi] run over admissible continuations:
/// all of them in lexicographic order if there are at most `cap`,
/// otherwise `cap` distinct random ones.
std::vector<cantor::SymbolSequence> continuations(const cantor::CantorSystem& sys, const cantor::SymbolSequence& anchor,
                                                  int m, long w_lo, long w_hi, long cap, Rng& rng);

}  // namespace psusp::sampling
