#include "gaugelab/bundle.hpp"
#include "gaugelab/error.hpp"

namespace gaugelab {

namespace {

constexpr const char* kSchema = "gaugelab.bundle/1";

SmoothMap map_from_json(const nlohmann::json& j) {
    const std::string tag = j.at("tag").get<std::string>();
    const auto& p = j.at("params");
    if (tag == "identity") return map_identity(Manifold::from_json(p.at("manifold")));
    if (tag == "project_base") return map_project_base(Manifold::from_json(p.at("product")));
    if (tag == "project_circle") return map_project_circle(Manifold::from_json(p.at("product")));
    if (tag == "include_slice") return map_include_slice(Manifold::from_json(p.at("product")), p.at("t").get<double>());
    if (tag == "include_fiber") {
        const auto xs = p.at("x").get<std::vector<double>>();
        return map_include_fiber(Manifold::from_json(p.at("product")),
                                 Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size())));
    }
    if (tag == "torus_cover")
        return map_torus_cover(p.at("periods").at(0).get<double>(), p.at("periods").at(1).get<double>(),
                               p.at("d").get<int>());
    if (tag == "circle_cover") return map_circle_cover(p.at("length").get<double>(), p.at("d").get<int>());
    throw Error(ErrorKind::SchemaError, "unknown map tag " + tag);
}

BundleAtlas from_recipe(const nlohmann::json& r) {
    if (!r.is_object() || !r.contains("family")) throw Error(ErrorKind::SchemaError, "recipe without family tag");
    const std::string fam = r.at("family").get<std::string>();
    if (fam == "trivial") return make_trivial(Manifold::from_json(r.at("base")), r.at("rank").get<int>());
    if (fam == "monopole") return make_monopole(r.at("k").get<int>(), r.value("scale", 1.0));
    if (fam == "torus_line")
        return make_torus_line(r.at("periods").at(0).get<double>(), r.at("periods").at(1).get<double>(),
                               r.at("c1").get<int>());
    if (fam == "constant_field_ball")
        return make_constant_field_ball(r.at("radius").get<double>(), r.at("field").get<double>());
    if (fam == "flat_circle") return make_flat_circle(r.at("length").get<double>(), r.at("theta").get<double>());
    if (fam == "perturb")
        return perturb(from_recipe(r.at("bundle")), r.at("seed").get<std::uint64_t>(), r.at("amplitude").get<double>(),
                       r.at("scale").get<double>());
    if (fam == "direct_sum") return direct_sum(from_recipe(r.at("a")), from_recipe(r.at("b")));
    if (fam == "pullback") return pullback(from_recipe(r.at("bundle")), map_from_json(r.at("map")));
    if (fam == "pushforward") return pushforward_cover(from_recipe(r.at("bundle")), map_from_json(r.at("map")));
    throw Error(ErrorKind::SchemaError, "bundle family '" + fam + "' cannot be rebuilt from JSON");
}

}  // namespace

nlohmann::json bundle_to_json(const BundleAtlas& b) {
    nlohmann::json charts = nlohmann::json::array();
    for (int i = 0; i < b.chart_count(); ++i) charts.push_back(b.chart(i).name);
    return {{"schema", kSchema},
            {"rank", b.rank()},
            {"base", b.base().to_json()},
            {"charts", charts},
            {"recipe", b.recipe}};
}

BundleAtlas bundle_from_json(const nlohmann::json& j) {
    if (j.value("schema", std::string()) != kSchema) throw Error(ErrorKind::SchemaError, "unsupported bundle schema");
    if (j.contains("sampled")) throw Error(ErrorKind::SchemaError, "sampled-grid bundles are not supported");
    BundleAtlas b = from_recipe(j.at("recipe"));
    if (b.rank() != j.at("rank").get<int>()) throw Error(ErrorKind::SchemaError, "rank does not match recipe");
    if (b.base() != Manifold::from_json(j.at("base"))) throw Error(ErrorKind::SchemaError, "base does not match recipe");
    return b;
}

}  // namespace gaugelab
