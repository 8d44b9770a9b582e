#include "msgw/html.hpp"

#include "msgw/text.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace msgw {

std::string escape_html(std::string_view text) {
    std::string out;
    out.reserve(text.size() + text.size() / 8);
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#x27;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string decode_html_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out.push_back(text[i++]);
            continue;
        }
        auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(text[i++]);
            continue;
        }
        auto name = text.substr(i + 1, semi - i - 1);
        std::string replacement;
        if (name == "amp") replacement = "&";
        else if (name == "lt") replacement = "<";
        else if (name == "gt") replacement = ">";
        else if (name == "quot") replacement = "\"";
        else if (name == "apos") replacement = "'";
        else if (name == "nbsp") text::append_utf8(replacement, 0xA0);
        else if (name.size() > 1 && name[0] == '#') {
            bool hex = name[1] == 'x' || name[1] == 'X';
            auto digits = name.substr(hex ? 2 : 1);
            unsigned value = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, hex ? 16 : 10);
            if (!digits.empty() && ec == std::errc{} && ptr == digits.data() + digits.size() && value > 0 &&
                value <= 0x10FFFF && !(value >= 0xD800 && value <= 0xDFFF))
                text::append_utf8(replacement, static_cast<char32_t>(value));
        }
        if (replacement.empty()) {
            out.push_back(text[i++]);
            continue;
        }
        out += replacement;
        i = semi + 1;
    }
    return out;
}

std::string html_to_text(std::string_view fragment) {
    // Inline formatting tags vanish; any other tag separates words.
    static const std::set<std::string, std::less<>> inline_tags = {
        "a", "abbr", "b", "bdi", "bdo", "cite", "code", "em", "font", "i", "mark", "q", "s", "small",
        "span", "strong", "sub", "sup", "time", "u"};
    std::string stripped;
    stripped.reserve(fragment.size());
    std::size_t i = 0;
    while (i < fragment.size()) {
        if (fragment[i] != '<') {
            stripped.push_back(fragment[i++]);
            continue;
        }
        auto close = fragment.find('>', i);
        if (close == std::string_view::npos)
            break;
        auto tag = fragment.substr(i + 1, close - i - 1);
        if (!tag.empty() && tag.front() == '/')
            tag.remove_prefix(1);
        std::string name;
        for (char c : tag) {
            if (!std::isalnum(static_cast<unsigned char>(c)))
                break;
            name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        if (!inline_tags.count(name))
            stripped.push_back(' ');
        i = close + 1;
    }
    std::string out;
    bool pending_space = false;
    for (char32_t cp : text::decode_utf8(decode_html_entities(stripped))) {
        if (text::is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        text::append_utf8(out, cp);
    }
    return out;
}

} // namespace msgw
