#include "groups.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "errors.hpp"

namespace seoe {

namespace {

// Union-find over indices.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

constexpr std::size_t kEmbedBatch = 64;

}  // namespace

std::size_t GroupSet::group_of(const std::string& type_id) const {
    auto it = index.find(type_id);
    if (it == index.end()) {
        throw ValidationError("type_id not in any group: " + type_id);
    }
    return it->second;
}

std::vector<std::vector<std::size_t>> components_from_similarity(
    const std::vector<std::vector<double>>& similarity, double threshold) {
    const std::size_t n = similarity.size();
    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (similarity[i].size() != n) {
            throw ValidationError("similarity matrix is not square");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (similarity[i][j] > threshold) sets.unite(i, j);
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < n; ++i) by_root[sets.find(i)].push_back(i);

    std::vector<std::vector<std::size_t>> components;
    components.reserve(by_root.size());
    for (auto& [_, members] : by_root) {
        std::sort(members.begin(), members.end());
        components.push_back(std::move(members));
    }
    std::sort(components.begin(), components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return components;
}

std::vector<std::vector<double>> embed_definitions(std::span<const EventTypeRecord> types,
                                                   ProviderGateway& gateway,
                                                   const std::string& embed_model) {
    std::vector<std::string> texts;
    texts.reserve(types.size());
    for (const auto& t : types) {
        if (!t.definition) {
            throw ValidationError("type has no definition: " + t.type_id);
        }
        texts.push_back(t.definition->text);
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(types.size());
    for (std::size_t start = 0; start < texts.size(); start += kEmbedBatch) {
        std::size_t end = std::min(texts.size(), start + kEmbedBatch);
        EmbeddingRequest request{
            embed_model,
            {texts.begin() + static_cast<std::ptrdiff_t>(start),
             texts.begin() + static_cast<std::ptrdiff_t>(end)}};
        auto batch = gateway.embed(request);
        for (auto& vec : batch) rows.push_back(std::move(vec));
    }
    return rows;
}

GroupSet build_groups_from_similarity(std::span<const EventTypeRecord> types,
                                      const std::vector<std::vector<double>>& similarity,
                                      double threshold) {
    auto components = components_from_similarity(similarity, threshold);

    GroupSet set;
    set.threshold = threshold;
    for (const auto& component : components) {
        std::vector<std::string> ids;
        ids.reserve(component.size());
        for (std::size_t i : component) ids.push_back(types[i].type_id);
        std::sort(ids.begin(), ids.end());
        set.groups.push_back(std::move(ids));
    }
    std::sort(set.groups.begin(), set.groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (std::size_t g = 0; g < set.groups.size(); ++g) {
        for (const auto& id : set.groups[g]) set.index[id] = g;
    }
    return set;
}

GroupSet build_groups(std::span<const EventTypeRecord> types, double threshold,
                      ProviderGateway& gateway, const std::string& embed_model) {
    auto embeddings = embed_definitions(types, gateway, embed_model);
    const std::size_t n = embeddings.size();
    std::vector<std::vector<double>> similarity(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = cosine(embeddings[i], embeddings[j]);
            similarity[i][j] = s;
            similarity[j][i] = s;
        }
    }
    return build_groups_from_similarity(types, similarity, threshold);
}

std::vector<std::pair<std::string, std::string>> group_context(
    const std::string& type_id, const GroupSet& group_set,
    std::span<const EventTypeRecord> types) {
    std::size_t ordinal = group_set.group_of(type_id);
    OntologyIndex index(types);
    std::vector<std::pair<std::string, std::string>> context;
    for (const auto& member : group_set.groups[ordinal]) {
        if (member == type_id) continue;
        const EventTypeRecord& record = index.at(member);
        context.emplace_back(member,
                             record.definition ? record.definition->text : std::string());
    }
    return context;
}

GroupSet load_groups(const std::filesystem::path& path) {
    json j = parse_json(read_file(path), path.string());
    GroupSet set;
    set.threshold = j.at("threshold").get<double>();
    for (const auto& group : j.at("groups")) {
        set.groups.push_back(group.get<std::vector<std::string>>());
    }
    for (std::size_t g = 0; g < set.groups.size(); ++g) {
        for (const auto& id : set.groups[g]) {
            if (!set.index.emplace(id, g).second) {
                throw ValidationError("type_id appears in two groups: " + id);
            }
        }
    }
    return set;
}

void save_groups(const std::filesystem::path& path, const GroupSet& group_set) {
    json groups = json::array();
    for (const auto& g : group_set.groups) groups.push_back(g);
    json j{{"threshold", group_set.threshold}, {"groups", std::move(groups)}};
    write_file_atomic(path, canonical_dump(j) + "\n");
}

void export_embedding_matrix(const std::filesystem::path& path,
                             std::span<const EventTypeRecord> types,
                             const std::vector<std::vector<double>>& embeddings) {
    if (types.size() != embeddings.size()) {
        throw ValidationError("embedding matrix does not match ontology size");
    }
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < types.size(); ++i) {
        out << types[i].type_id << "\t";
        for (std::size_t d = 0; d < embeddings[i].size(); ++d) {
            if (d) out << " ";
            out << embeddings[i][d];
        }
        out << "\n";
    }
    write_file_atomic(path, out.str());
}

}  // namespace seoe
