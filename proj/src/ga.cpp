#include "semlens/ga.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "semlens/util.hpp"

namespace semlens {

void GaConfig::validate() const {
    if (population < 2 || population % 2 != 0) throw InvalidParam("population must be even and >= 2");
    if (generations < 1) throw InvalidParam("generations must be >= 1");
    if (mutation_prob < 0.0 || mutation_prob > 1.0) throw InvalidParam("mutation probability must be in [0,1]");
}

Image genome_to_image(const Image& image, const Segmentation& seg, const Genome& genome,
                      const std::array<double, 3>& background) {
    image.require_rgb();
    if (image.height() != seg.h || image.width() != seg.w)
        throw ShapeMismatch("segmentation size does not match image");
    if (genome.bits.size() != static_cast<std::size_t>(seg.num_segments()))
        throw ShapeMismatch("genome length does not match segment count");

    Image out = image;
    for (int y = 0; y < seg.h; ++y) {
        for (int x = 0; x < seg.w; ++x) {
            if (genome.bits[seg.label_at(y, x)]) continue;
            for (int c = 0; c < 3; ++c) out.pixels.at(c, y, x) = background[c];
        }
    }
    return out;
}

double fitness(const CnnModel& model, const Image& image, const Segmentation& seg,
               const Genome& genome, int class_id, const std::array<double, 3>& background) {
    if (class_id < 0 || class_id >= model.num_classes()) throw InvalidParam("class id out of range");
    return predict(model, genome_to_image(image, seg, genome, background))[class_id];
}

namespace {

std::string genome_key(const Genome& g) {
    std::string key(g.bits.size(), '0');
    for (std::size_t i = 0; i < g.bits.size(); ++i)
        if (g.bits[i]) key[i] = '1';
    return key;
}

Genome random_genome(Rng& rng, int length) {
    Genome g;
    g.bits.resize(length);
    for (auto& b : g.bits) b = rng.bernoulli(0.5) ? 1 : 0;
    return g;
}

}  // namespace

GaResult evolve(const std::function<double(const Genome&)>& fitness_fn, int genome_length,
                const GaConfig& config) {
    config.validate();
    if (genome_length < 1) throw InvalidParam("genome length must be >= 1");

    Rng rng(config.seed);
    const int np = config.population;
    std::vector<Genome> pop;
    pop.reserve(np);
    for (int i = 0; i < np; ++i) pop.push_back(random_genome(rng, genome_length));

    std::unordered_map<std::string, double> cache;
    auto evaluate_all = [&](const std::vector<Genome>& genomes) {
        std::vector<const Genome*> missing;
        for (const Genome& g : genomes)
            if (!cache.count(genome_key(g))) {
                bool queued = false;
                for (const Genome* m : missing)
                    if (*m == g) { queued = true; break; }
                if (!queued) missing.push_back(&g);
            }
        std::vector<double> values(missing.size());
        parallel_for(static_cast<int>(missing.size()), [&](int i) { values[i] = fitness_fn(*missing[i]); });
        for (std::size_t i = 0; i < missing.size(); ++i) cache[genome_key(*missing[i])] = values[i];
        std::vector<double> fit(genomes.size());
        for (std::size_t i = 0; i < genomes.size(); ++i) fit[i] = cache.at(genome_key(genomes[i]));
        return fit;
    };

    GaResult res;
    bool have_elite = false;

    for (int gen = 0; gen < config.generations; ++gen) {
        // slot 0 holds the elite once one exists; it is exempt from variation
        const int first = have_elite ? 1 : 0;

        // single-point crossover on random disjoint pairs
        if (genome_length >= 2) {
            std::vector<int> idx;
            for (int i = first; i < np; ++i) idx.push_back(i);
            rng.shuffle(idx);
            for (std::size_t p = 0; p + 1 < idx.size(); p += 2) {
                const int cut = rng.uniform_int(1, genome_length - 1);
                Genome& a = pop[idx[p]];
                Genome& b = pop[idx[p + 1]];
                for (int j = cut; j < genome_length; ++j) std::swap(a.bits[j], b.bits[j]);
            }
        }

        // mutation: with probability p_mut per genome, each bit flips with
        // probability 1/length (one expected flip)
        const double per_bit = 1.0 / genome_length;
        for (int i = first; i < np; ++i) {
            if (!rng.bernoulli(config.mutation_prob)) continue;
            for (auto& b : pop[i].bits)
                if (rng.bernoulli(per_bit)) b ^= 1;
        }

        std::vector<double> fit = evaluate_all(pop);

        std::vector<int> order(np);
        for (int i = 0; i < np; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fit[a] > fit[b]; });

        if (!have_elite || fit[order[0]] > res.best_fitness) {
            res.best = pop[order[0]];
            res.best_fitness = fit[order[0]];
            have_elite = true;
        }
        res.elite_trace.push_back(res.best_fitness);
        double mean = 0.0;
        for (double f : fit) mean += f;
        res.mean_trace.push_back(mean / np);

        // top half survives, bottom half is replaced by fresh random genomes
        std::vector<Genome> next;
        next.reserve(np);
        for (int i = 0; i < np / 2; ++i) next.push_back(pop[order[i]]);
        bool elite_present = false;
        for (const Genome& g : next)
            if (g == res.best) { elite_present = true; break; }
        if (!elite_present) next.back() = res.best;
        for (std::size_t i = 0; i < next.size(); ++i) {
            if (next[i] == res.best) {
                std::swap(next[0], next[i]);
                break;
            }
        }
        for (int i = np / 2; i < np; ++i) next.push_back(random_genome(rng, genome_length));
        pop = std::move(next);
    }
    return res;
}

GaResult evolve(const CnnModel& model, const Image& image, const Segmentation& seg,
                int class_id, const GaConfig& config) {
    if (class_id < 0 || class_id >= model.num_classes()) throw InvalidParam("class id out of range");
    const std::array<double, 3> background = {model.norm.mean[0], model.norm.mean[1], model.norm.mean[2]};
    return evolve(
        [&](const Genome& g) { return fitness(model, image, seg, g, class_id, background); },
        seg.num_segments(), config);
}

}  // namespace semlens
