#pragma once

#include <array>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ptts {

// Unicode NFC. Ill-formed byte sequences are replaced with U+FFFD.
std::string nfc_normalize(std::string_view utf8);

// Split on runs of ASCII whitespace; no case folding, punctuation kept.
std::vector<std::string> whitespace_tokens(std::string_view text);

using Trigram = std::array<std::string, 3>;

// Pluggable token counter. Counting defaults to whitespace tokens;
// trainer-side subword counts differ, so the counter is swappable.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::string_view name() const = 0;
  virtual std::size_t count_tokens(std::string_view text) const = 0;
};

class WhitespaceTokenizer : public Tokenizer {
 public:
  std::string_view name() const override { return "whitespace"; }
  std::size_t count_tokens(std::string_view text) const override;
};

// nullptr when the name is unknown; "whitespace" is the only built-in.
std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name);

}  // namespace ptts
