// transducer.hpp -- restricted rational transducers (one input letter per
// step) and the generic full-trio closure of amalgamation systems.
#pragma once

#include <map>

#include "amalgam/nfa.hpp"
#include "amalgam/system.hpp"

namespace amalgam {

struct TransducerTransition {
  std::string from;
  Letter in;   ///< exactly one input letter
  Word out;    ///< output word (possibly empty)
  std::string to;
  bool operator==(const TransducerTransition&) const = default;
};

/// A rational transducer where every step consumes exactly one input
/// letter; optional initial/final output words per state.
struct Transducer {
  std::vector<std::string> states;
  std::vector<Letter> input_alphabet;
  std::vector<Letter> output_alphabet;
  std::vector<TransducerTransition> transitions;
  std::vector<std::string> initial;
  std::vector<std::string> final_states;
  std::map<std::string, Word> initial_output;
  std::map<std::string, Word> final_output;

  bool has_boundary_outputs() const;
};

/// Parses the text format:
///   initial: p        final: q
///   trans: p a / xyz q     (output '_' for ε; multi-char letters comma-split)
///   initout: p w           finalout: q w
Transducer parse_transducer(const std::string& text);
std::string serialize_transducer(const Transducer& t);

/// Identity transducer on the given alphabet.
Transducer identity_transducer(std::vector<Letter> alphabet);
/// Filter transducer: out = in, restricted to the language of the given
/// ε-free NFA (the NFA is determinized internally if needed).
Transducer filter_transducer(const Nfa& a);

/// All transduction images of w, deduplicated, sorted.
std::vector<Word> transducer_images(const Transducer& t, const Word& w);

/// Product construction: L(result) = T(L(a)).
Nfa apply_to_nfa(const Nfa& a, const Transducer& t);

/// Generic finite-state decoration wrapper. Used as the default
/// System::transduce; exactness of emptiness is only structural (bounded
/// run search), so concrete systems override transduce() where possible.
SystemPtr make_transduced_system(SystemPtr base, const Transducer& t);

/// Filters a system to L(S) ∩ L(a): transduces with the filter transducer
/// of the (determinized) NFA.
SystemPtr intersect_regular(SystemPtr base, const Nfa& a);

struct Vass;
/// Structural product of a labelled VASS with a transducer (used by the
/// VASS system's transduce override).
Vass vass_transduce(const Vass& v, const Transducer& t);

}  // namespace amalgam
