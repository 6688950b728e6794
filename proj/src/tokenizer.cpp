#include <algorithm>

#include "biaslens/corpus.hpp"
#include "biaslens/hash.hpp"
#include "biaslens/utf8.hpp"

namespace biaslens {

namespace {

enum class CharClass { Word, Space, Apostrophe, Hyphen, Terminator, Closer, Other };

bool is_space(char32_t cp) {
    return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
           (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
           cp == 0x3000;
}

bool is_non_word(char32_t cp) {
    if (cp < 0x80) {
        bool alnum = (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
        return !alnum;
    }
    if (cp <= 0xBF) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;
    if (cp == 0xD7 || cp == 0xF7) return true;
    if (cp >= 0x2000 && cp <= 0x2BFF) return true;  // punctuation, symbols, arrows, shapes
    if (cp >= 0x2E00 && cp <= 0x2E7F) return true;
    if (cp >= 0x3000 && cp <= 0x303F) return true;
    if (cp >= 0xFE30 && cp <= 0xFE6F) return true;
    if (cp >= 0xFF01 && cp <= 0xFF0F) return true;
    if (cp >= 0xFF1A && cp <= 0xFF20) return true;
    if (cp == 0xFFFD || cp == 0xFEFF) return true;
    if (cp >= 0x1F000 && cp <= 0x1FAFF) return true;  // emoji and pictographs
    return false;
}

CharClass classify(char32_t cp) {
    if (is_space(cp)) return CharClass::Space;
    switch (cp) {
        case '\'':
        case 0x2019:
        case 0x02BC:
            return CharClass::Apostrophe;
        case '-':
        case 0x2010:
        case 0x2011:
            return CharClass::Hyphen;
        case '.':
        case '!':
        case '?':
            return CharClass::Terminator;
        case '"':
        case ')':
        case ']':
        case 0x201D:
        case 0x00BB:
            return CharClass::Closer;
        default:
            break;
    }
    return is_non_word(cp) ? CharClass::Other : CharClass::Word;
}

char32_t to_lower(char32_t cp) {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp >= 0x100 && cp <= 0x137) return cp | 1;
    if (cp >= 0x139 && cp <= 0x148) return (cp & 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return cp | 1;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E) return (cp & 1) ? cp + 1 : cp;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
    return cp;
}

bool is_upper(char32_t cp) { return to_lower(cp) != cp; }

struct Scanned {
    char32_t cp;
    CharClass cls;
};

}  // namespace

std::uint64_t TokenizeConfig::hash() const {
    Fnv1a h;
    h.update("tokenizer:v1");
    h.update_value(static_cast<std::uint8_t>(lowercase));
    h.update_value(static_cast<std::uint8_t>(keep_apostrophes));
    h.update_value(static_cast<std::uint8_t>(keep_hyphens));
    return h.digest();
}

bool TokenSequence::well_formed() const {
    std::uint32_t prev_end = 0;
    for (const auto& s : sentences) {
        if (s.begin >= s.end || s.begin < prev_end || s.end > tokens.size()) return false;
        prev_end = s.end;
    }
    return std::all_of(tokens.begin(), tokens.end(), [](const std::string& t) {
        return !t.empty() && std::none_of(t.begin(), t.end(), [](unsigned char c) { return c == ' ' || (c >= 9 && c <= 13); });
    });
}

TokenSequence tokenize(std::string_view text, const TokenizeConfig& config) {
    std::vector<Scanned> chars;
    chars.reserve(text.size());
    for (std::size_t pos = 0; pos < text.size();) {
        char32_t cp = utf8::decode(text, pos);
        chars.push_back({cp, classify(cp)});
    }

    TokenSequence out;
    std::string current;
    std::uint32_t sentence_begin = 0;
    auto flush_token = [&]() {
        if (!current.empty()) {
            out.tokens.push_back(std::move(current));
            current.clear();
        }
    };
    auto close_sentence = [&]() {
        auto end = static_cast<std::uint32_t>(out.tokens.size());
        if (end > sentence_begin) out.sentences.push_back({sentence_begin, end});
        sentence_begin = end;
    };
    auto word_at = [&](std::size_t i) { return i < chars.size() && chars[i].cls == CharClass::Word; };

    for (std::size_t i = 0; i < chars.size(); ++i) {
        const auto [cp, cls] = chars[i];
        if (cls == CharClass::Word) {
            utf8::append(current, config.lowercase ? to_lower(cp) : cp);
            continue;
        }
        bool joiner = (cls == CharClass::Apostrophe && config.keep_apostrophes) ||
                      (cls == CharClass::Hyphen && config.keep_hyphens);
        if (joiner && !current.empty() && word_at(i + 1)) {
            current.push_back(cls == CharClass::Apostrophe ? '\'' : '-');
            continue;
        }
        flush_token();
        if (cls != CharClass::Terminator) continue;

        // Consume the rest of a terminator run and any closing quotes/brackets.
        std::size_t j = i + 1;
        while (j < chars.size() && (chars[j].cls == CharClass::Terminator || chars[j].cls == CharClass::Closer ||
                                    chars[j].cls == CharClass::Apostrophe)) {
            ++j;
        }
        std::size_t k = j;
        while (k < chars.size() && chars[k].cls == CharClass::Space) ++k;
        bool at_end = k == chars.size();
        bool breaks = at_end;
        if (!at_end && k > j) {
            std::size_t m = k;
            while (m < chars.size() && (chars[m].cp == '"' || chars[m].cp == 0x201C || chars[m].cp == '\'' ||
                                        chars[m].cp == 0x2018 || chars[m].cp == '(')) {
                ++m;
            }
            breaks = m < chars.size() && is_upper(chars[m].cp);
        }
        if (breaks) close_sentence();
        i = j - 1;
    }
    flush_token();
    close_sentence();
    return out;
}

}  // namespace biaslens
