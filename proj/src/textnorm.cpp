#include "ptts/textnorm.hpp"

#include <unicode/bytestream.h>
#include <unicode/errorcode.h>
#include <unicode/normalizer2.h>
#include <unicode/stringpiece.h>

#include <cctype>
#include <stdexcept>

namespace ptts {

namespace {

bool is_ascii(std::string_view text) {
  for (unsigned char c : text) {
    if (c >= 0x80) return false;
  }
  return true;
}

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string nfc_normalize(std::string_view utf8) {
  if (is_ascii(utf8)) {
    return std::string(utf8);  // NFC is the identity on ASCII
  }
  icu::ErrorCode status;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (status.isFailure()) {
    throw std::runtime_error("ICU NFC instance unavailable");
  }
  std::string out;
  icu::StringByteSink<std::string> sink(&out);
  nfc->normalizeUTF8(0, icu::StringPiece(utf8.data(),
                                         static_cast<int32_t>(utf8.size())),
                     sink, nullptr, status);
  if (status.isFailure()) {
    throw std::runtime_error("ICU NFC normalization failed");
  }
  return out;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) {
      tokens.emplace_back(text.substr(start, i - start));
    }
  }
  return tokens;
}

std::size_t WhitespaceTokenizer::count_tokens(std::string_view text) const {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name) {
  if (name == "whitespace") {
    return std::make_unique<WhitespaceTokenizer>();
  }
  return nullptr;
}

}  // namespace ptts
