#include "feat/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <json.hpp>
#include <mutex>
#include <thread>

namespace feat::pipeline {

geom::LandmarkSet template_in_crop(int crop) {
    const geom::LandmarkSet& tmpl = geom::neutral_template();
    const double s = 0.4 * crop / 100.0;
    geom::LandmarkSet out;
    for (std::size_t i = 0; i < 68; ++i)
        out[i] = {tmpl[i].x * s + crop / 2.0, tmpl[i].y * s + crop / 2.0};
    return out;
}

feats::GrayImage warp_to_crop(const feats::GrayImage& img, const geom::SimilarityTransform& to_crop,
                              int crop) {
    const geom::SimilarityTransform inv = to_crop.inverse();
    feats::GrayImage out(crop, crop);
    auto sample = [&](double x, double y) {
        const double cx = std::clamp(x, 0.0, img.width - 1.0);
        const double cy = std::clamp(y, 0.0, img.height - 1.0);
        const int x0 = static_cast<int>(cx);
        const int y0 = static_cast<int>(cy);
        const int x1 = std::min(x0 + 1, img.width - 1);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fx = cx - x0, fy = cy - y0;
        return (1.0 - fy) * ((1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0)) +
               fy * ((1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1));
    };
    for (int y = 0; y < crop; ++y) {
        for (int x = 0; x < crop; ++x) {
            const geom::Point src =
                inv.apply(geom::Point{static_cast<double>(x), static_cast<double>(y)});
            out.at(x, y) = sample(src.x, src.y);
        }
    }
    return out;
}

ExtractedParts extract_parts(const feats::GrayImage& img, const geom::LandmarkSet& lm,
                             const ExtractionConfig& cfg) {
    if (cfg.crop % cfg.hog.cell != 0) fail("BadDimensions", "crop must be divisible by hog cell");

    const geom::LandmarkSet target = template_in_crop(cfg.crop);
    const geom::SimilarityTransform to_crop = geom::fit_similarity(lm, target).transform;
    const feats::GrayImage crop_img = warp_to_crop(img, to_crop, cfg.crop);
    const geom::LandmarkSet aligned = to_crop.apply(lm);
    const geom::Mask mask = geom::face_mask(aligned, cfg.crop, cfg.crop);

    return {feats::hog(crop_img, &mask, cfg.hog), aligned.flat()};
}

feats::FeatureVector compose_features(const ExtractedParts& parts, const ExtractionConfig& cfg,
                                      const feats::PcaModel* pca) {
    feats::FeatureVector fv;
    fv.values = parts.hog;
    fv.provenance = feats::Provenance::hog;
    if (pca) {
        Matrix x(1, fv.values.size());
        std::copy(fv.values.begin(), fv.values.end(), x.row(0).data());
        const Matrix scores = feats::pca_transform(*pca, x);
        fv.values.assign(scores.row(0).begin(), scores.row(0).end());
        fv.provenance = feats::Provenance::hog_pca;
    }
    if (cfg.include_landmarks) {
        fv.values.insert(fv.values.end(), parts.aligned_landmarks.begin(),
                         parts.aligned_landmarks.end());
        fv.provenance = feats::Provenance::landmarks_hog;
    }
    return fv;
}

feats::FeatureVector extract_features(const feats::GrayImage& img, const geom::LandmarkSet& lm,
                                      const ExtractionConfig& cfg, const feats::PcaModel* pca) {
    return compose_features(extract_parts(img, lm, cfg), cfg, pca);
}

fex::FexTable detect_aus(std::span<const feats::GrayImage> images,
                         std::span<const geom::LandmarkSet> landmarks, const AuModelSet& models) {
    if (images.size() != landmarks.size())
        fail("DimensionMismatch", "image and landmark batch sizes differ");

    // All present models must agree on one extraction pipeline.
    const learn::TrainedModel* ref = nullptr;
    for (const auto& m : models) {
        if (!m) continue;
        if (!m->pipeline.hog) fail("ModelConfigMismatch", "AU model lacks pipeline metadata");
        if (!ref) {
            ref = &*m;
        } else if (!(m->pipeline == ref->pipeline)) {
            fail("ModelConfigMismatch", "AU models disagree on extraction configuration");
        }
    }

    fex::FexTable out;
    if (images.empty() || !ref) {
        for (std::size_t i = 0; i < images.size(); ++i) {
            fex::FexRow row;
            row.frame = static_cast<std::int64_t>(i);
            row.time_s = static_cast<double>(i);
            out.rows.push_back(std::move(row));
        }
        return out;
    }

    ExtractionConfig cfg;
    cfg.crop = ref->pipeline.crop;
    cfg.hog = *ref->pipeline.hog;
    cfg.include_landmarks = ref->pipeline.include_landmarks;
    const feats::PcaModel* pca = ref->pipeline.pca ? &*ref->pipeline.pca : nullptr;

    for (std::size_t i = 0; i < images.size(); ++i) {
        const feats::FeatureVector fv = extract_features(images[i], landmarks[i], cfg, pca);
        Matrix x(1, fv.values.size());
        std::copy(fv.values.begin(), fv.values.end(), x.row(0).data());

        fex::FexRow row;
        row.frame = static_cast<std::int64_t>(i);
        row.time_s = static_cast<double>(i);
        const auto flat = landmarks[i].flat();
        std::copy(flat.begin(), flat.end(), row.landmarks.begin());
        for (std::size_t a = 0; a < fex::kNumAus; ++a) {
            if (!models[a]) continue;
            row.aus[a] = learn::predict_proba(*models[a], x)(0, 1);
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

ReplicateReport replicate_goodnews(const fex::FexTable& table,
                                   const std::map<std::string, std::string>& condition_of_session) {
    const fex::FexTable means = feats::summarize_sessions(table, feats::SessionStat::mean);

    std::vector<std::string> conditions;
    for (const auto& row : means.rows) {
        const auto it = condition_of_session.find(row.session);
        if (it == condition_of_session.end())
            fail("MissingColumn", "no condition for session '" + row.session + "'");
        if (std::find(conditions.begin(), conditions.end(), it->second) == conditions.end())
            conditions.push_back(it->second);
    }
    std::sort(conditions.begin(), conditions.end());
    if (conditions.size() != 2)
        fail("TooFewSamples", "replication needs exactly 2 conditions, got " +
                                  std::to_string(conditions.size()));

    std::vector<std::size_t> neg_rows, pos_rows;
    for (std::size_t i = 0; i < means.rows.size(); ++i)
        (condition_of_session.at(means.rows[i].session) == conditions[1] ? pos_rows : neg_rows)
            .push_back(i);
    if (neg_rows.size() < 2 || pos_rows.size() < 2)
        fail("TooFewSamples", "each condition needs at least 2 sessions");

    ReplicateReport report;
    report.conditions = conditions;
    report.n_sessions = means.rows.size();
    report.df = static_cast<double>(means.rows.size() - 2);

    for (std::size_t a = 0; a < fex::kNumAus; ++a) {
        std::vector<double> pos, neg;
        for (std::size_t i : pos_rows) pos.push_back(means.rows[i].aus[a]);
        for (std::size_t i : neg_rows) neg.push_back(means.rows[i].aus[a]);
        report.ttests[a] = stats::ttest_ind(pos, neg);  // positive t = higher in conditions[1]
    }

    Matrix X(means.rows.size(), fex::kNumAus);
    std::vector<int> y(means.rows.size());
    std::vector<std::string> groups(means.rows.size());
    for (std::size_t i = 0; i < means.rows.size(); ++i) {
        std::copy(means.rows[i].aus.begin(), means.rows[i].aus.end(), X.row(i).data());
        y[i] = condition_of_session.at(means.rows[i].session) == conditions[1] ? 1 : 0;
        groups[i] = means.rows[i].session;
    }

    learn::LogisticConfig lcfg;
    lcfg.l2 = 1e-2;
    lcfg.max_iter = 1000;
    const auto logo =
        learn::leave_one_group_out(X, y, groups, learn::ModelKind::logistic, lcfg, {}, {});
    report.logo_accuracy = logo.accuracy;

    const learn::TrainedModel full = learn::train_logistic(X, y, lcfg);
    std::copy(full.linear[0].weights.begin(), full.linear[0].weights.end(),
              report.coefficients.begin());
    report.intercept = full.linear[0].bias;
    return report;
}

std::string ReplicateReport::to_json() const {
    nlohmann::json j;
    j["conditions"] = conditions;
    j["n_sessions"] = n_sessions;
    j["df"] = df;
    nlohmann::json tt = nlohmann::json::object();
    for (std::size_t a = 0; a < fex::kNumAus; ++a) {
        tt[fex::kAuNames[a]] = {{"t", ttests[a].t},
                                {"df", ttests[a].df},
                                {"p", ttests[a].p}};
    }
    j["ttests"] = std::move(tt);
    j["logo_accuracy"] = logo_accuracy;
    nlohmann::json coef = nlohmann::json::object();
    for (std::size_t a = 0; a < fex::kNumAus; ++a) coef[fex::kAuNames[a]] = coefficients[a];
    j["coefficients"] = std::move(coef);
    j["intercept"] = intercept;
    return j.dump(2) + "\n";
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::exception_ptr error;
    std::mutex error_mu;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace feat::pipeline
