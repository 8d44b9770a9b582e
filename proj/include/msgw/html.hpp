#ifndef MSGW_HTML_HPP
#define MSGW_HTML_HPP

#include <string>
#include <string_view>

namespace msgw {

// & < > " ' become &amp; &lt; &gt; &quot; &#x27; (ampersand first).
std::string escape_html(std::string_view text);

// Named entities amp, lt, gt, quot, apos, nbsp plus decimal and hex numeric
// references. Unknown entities are left as-is.
std::string decode_html_entities(std::string_view text);

// Removes tags, decodes entities and collapses whitespace runs to one space.
std::string html_to_text(std::string_view fragment);

} // namespace msgw

#endif
