#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "cfh/text.hpp"

namespace cfh::ingestion {

struct ExtractedDocument {
  std::string title;
  std::string body;
};

namespace detail {

inline void append_utf8(std::string& out, unsigned long cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string decode_entities(std::string_view s) {
  struct Named {
    std::string_view name;
    unsigned long cp;
  };
  static constexpr std::array<Named, 16> kNamed = {{{"amp", '&'},
                                                    {"lt", '<'},
                                                    {"gt", '>'},
                                                    {"quot", '"'},
                                                    {"apos", '\''},
                                                    {"nbsp", ' '},
                                                    {"mdash", 0x2014},
                                                    {"ndash", 0x2013},
                                                    {"hellip", 0x2026},
                                                    {"lsquo", 0x2018},
                                                    {"rsquo", 0x2019},
                                                    {"ldquo", 0x201C},
                                                    {"rdquo", 0x201D},
                                                    {"copy", 0xA9},
                                                    {"eacute", 0xE9},
                                                    {"laquo", 0xAB}}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    auto ent = s.substr(i + 1, semi - i - 1);
    bool done = false;
    if (!ent.empty() && ent[0] == '#') {
      unsigned long cp = 0;
      bool ok = ent.size() > 1;
      const bool hex = ok && (ent[1] == 'x' || ent[1] == 'X');
      for (std::size_t k = hex ? 2 : 1; ok && k < ent.size(); ++k) {
        const char c = ent[k];
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0) ok = false;
        else cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(d);
        if (cp > 0x10FFFF) ok = false;
      }
      if (ok && ent.size() > (hex ? 2u : 1u)) {
        append_utf8(out, cp);
        done = true;
      }
    } else {
      for (const auto& n : kNamed) {
        if (n.name == ent) {
          append_utf8(out, n.cp);
          done = true;
          break;
        }
      }
    }
    if (done) i = semi;
    else out.push_back('&');
  }
  return out;
}

inline bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == ':';
}

inline bool is_block_tag(std::string_view tag) {
  static constexpr std::array<std::string_view, 24> kBlock = {
      "p",  "div", "br",      "li",     "ul",      "ol",   "h1",    "h2",   "h3",    "h4",   "h5",  "h6",
      "tr", "td",  "section", "article", "header", "footer", "table", "blockquote", "hr", "nav", "aside", "main"};
  for (auto b : kBlock)
    if (b == tag) return true;
  return false;
}

inline bool is_hidden_container(std::string_view tag) {
  return tag == "script" || tag == "style" || tag == "noscript" || tag == "template" || tag == "svg" ||
         tag == "iframe" || tag == "object";
}

}  // namespace detail

/// Strips markup from an HTML document. Script/style-like containers and
/// comments are dropped; the body is the concatenated `<p>` text (one line per
/// paragraph) or, if the page has no paragraphs, all visible text. Whitespace is
/// collapsed and entities decoded.
inline ExtractedDocument extract_html(std::string_view html) {
  std::string title_raw;
  std::string visible_raw;
  std::vector<std::string> paragraphs;
  std::string current_para;
  int p_depth = 0;
  bool in_title = false;

  auto emit_text = [&](std::string_view t) {
    if (in_title) {
      title_raw.append(t);
      return;
    }
    visible_raw.append(t);
    if (p_depth > 0) current_para.append(t);
  };
  auto close_paragraph = [&] {
    auto cleaned = text::collapse_whitespace(detail::decode_entities(current_para));
    if (!cleaned.empty()) paragraphs.push_back(std::move(cleaned));
    current_para.clear();
  };

  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      const auto next = html.find('<', i);
      const auto end = next == std::string_view::npos ? html.size() : next;
      emit_text(html.substr(i, end - i));
      i = end;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      const auto close = html.find("-->", i + 4);
      i = close == std::string_view::npos ? html.size() : close + 3;
      continue;
    }
    std::size_t j = i + 1;
    const bool closing = j < html.size() && html[j] == '/';
    if (closing) ++j;
    const std::size_t name_start = j;
    while (j < html.size() && detail::is_name_char(html[j])) ++j;
    const bool starts_alpha = j > name_start && ((html[name_start] >= 'a' && html[name_start] <= 'z') ||
                                                 (html[name_start] >= 'A' && html[name_start] <= 'Z'));
    if (!starts_alpha && !(i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?'))) {
      // A bare '<' that does not open a tag is text.
      emit_text("<");
      ++i;
      continue;
    }
    const std::string tag = text::to_lower(html.substr(name_start, j - name_start));
    // Find the end of the tag, skipping quoted attribute values.
    char quote = 0;
    while (j < html.size()) {
      const char c = html[j];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        break;
      }
      ++j;
    }
    const bool self_closing = j > 0 && j < html.size() && html[j - 1] == '/';
    i = j < html.size() ? j + 1 : html.size();

    if (!closing && !self_closing && detail::is_hidden_container(tag)) {
      const std::string close_tag = "</" + tag;
      std::size_t k = i;
      while (k < html.size()) {
        k = html.find("</", k);
        if (k == std::string_view::npos) {
          k = html.size();
          break;
        }
        if (text::starts_with_icase(html.substr(k), close_tag)) break;
        k += 2;
      }
      const auto gt = html.find('>', k);
      i = gt == std::string_view::npos ? html.size() : gt + 1;
      continue;
    }
    if (tag == "title") {
      in_title = !closing && !self_closing;
      continue;
    }
    if (tag == "p") {
      if (closing) {
        if (p_depth > 0) {
          --p_depth;
          if (p_depth == 0) close_paragraph();
        }
      } else if (!self_closing) {
        if (p_depth > 0) close_paragraph();  // implicit close of an open <p>
        p_depth = 1;
      }
    } else if (p_depth > 0 && (tag == "div" || tag == "section" || tag == "article" || tag == "body")) {
      p_depth = 0;
      close_paragraph();
    } else if (p_depth > 0 && tag == "br") {
      current_para.push_back(' ');
    }
    if (detail::is_block_tag(tag)) visible_raw.push_back('\n');
  }
  if (p_depth > 0) close_paragraph();

  ExtractedDocument doc;
  doc.title = text::collapse_whitespace(detail::decode_entities(title_raw));
  if (!paragraphs.empty()) {
    for (std::size_t k = 0; k < paragraphs.size(); ++k) {
      if (k) doc.body.push_back('\n');
      doc.body += paragraphs[k];
    }
  } else {
    doc.body = text::collapse_whitespace(detail::decode_entities(visible_raw));
  }
  return doc;
}

}  // namespace cfh::ingestion
