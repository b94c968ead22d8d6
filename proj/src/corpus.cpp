#include "rbcm/corpus.hpp"

#include <sstream>

#include "rbcm/errors.hpp"

namespace rbcm {

namespace detail {
struct EmbeddedFile {
    const char* name;
    const char* text;
};
// Generated from corpus/*.mach at configure time.
extern const EmbeddedFile kCorpusFiles[];
extern const std::size_t kCorpusFileCount;
} // namespace detail

std::vector<std::string> corpus_names()
{
    std::vector<std::string> names;
    for (std::size_t i = 0; i < detail::kCorpusFileCount; ++i) {
        names.emplace_back(detail::kCorpusFiles[i].name);
    }
    return names;
}

namespace {

std::string unquote(const std::string& w)
{
    if (w.size() >= 2 && w.front() == '"' && w.back() == '"') {
        return w.substr(1, w.size() - 2);
    }
    return w;
}

} // namespace

CorpusEntry load_corpus(const std::string& name)
{
    for (std::size_t i = 0; i < detail::kCorpusFileCount; ++i) {
        if (name != detail::kCorpusFiles[i].name) {
            continue;
        }
        CorpusEntry e;
        e.name = name;
        e.text = detail::kCorpusFiles[i].text;
        e.file = parse_machine_file(e.text);
        std::istringstream in(e.text);
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string hash, key;
            ls >> hash >> key;
            if (hash != "#") {
                continue;
            }
            if (key == "description") {
                std::getline(ls >> std::ws, e.description);
            } else if (key == "expect") {
                std::string verdict, word, tag;
                ls >> verdict >> word >> tag;
                if (tag.size() >= 2 && tag.front() == '[' && tag.back() == ']') {
                    tag = tag.substr(1, tag.size() - 2);
                }
                e.expected.push_back({unquote(word), verdict == "accept", tag});
            }
        }
        return e;
    }
    throw UnknownEntry(name);
}

} // namespace rbcm
