#include "sigemb/simplicial.hpp"

#include <Eigen/Dense>
#include <map>
#include <set>

namespace sigemb {

Complex Complex::circle(int n) {
    require(n >= 3, "cycle needs at least 3 vertices");
    Complex c;
    for (int i = 0; i < n; ++i)
        c.verts.push_back({std::cos(2 * kPi * i / n), std::sin(2 * kPi * i / n)});
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        c.maximal.push_back({std::min(i, j), std::max(i, j)});
    }
    return c;
}

Complex Complex::simplex(int d) {
    Complex c;
    for (int i = 0; i <= d; ++i) {
        std::vector<double> v(d, 0.0);
        if (i > 0) v[i - 1] = 1.0;
        c.verts.push_back(v);
    }
    std::vector<int> all(d + 1);
    for (int i = 0; i <= d; ++i) all[i] = i;
    c.maximal.push_back(all);
    return c;
}

std::vector<double> vertex_map_eval(const Complex& c,
                                    const std::vector<std::vector<double>>& images,
                                    const SimplexPoint& p) {
    const auto& s = c.maximal[p.maximal_id];
    require(s.size() == p.bary.size(), "barycentric size mismatch");
    std::vector<double> out(images[s[0]].size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += p.bary[i] * images[s[i]][d];
    return out;
}

Complex barycentric_subdivide(const Complex& c, std::vector<SimplexPoint>* points) {
    Complex out;
    std::map<std::vector<int>, int> face_vertex;  // face (sorted ids) -> new vertex
    auto face_vert = [&](const std::vector<int>& face) {
        auto it = face_vertex.find(face);
        if (it != face_vertex.end()) return it->second;
        std::vector<double> coord;
        if (!c.verts[face[0]].empty()) {
            coord.assign(c.verts[face[0]].size(), 0.0);
            for (int v : face)
                for (std::size_t d = 0; d < coord.size(); ++d)
                    coord[d] += c.verts[v][d] / face.size();
        }
        int id = out.vertex_count();
        out.verts.push_back(coord);
        face_vertex[face] = id;
        return id;
    };

    // flags within each maximal simplex become the new maximal simplices
    std::map<std::pair<int, std::vector<int>>, int> flag_id;  // (max id, perm) -> new max id
    for (std::size_t mi = 0; mi < c.maximal.size(); ++mi) {
        const auto& s = c.maximal[mi];
        std::vector<int> perm(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) perm[i] = static_cast<int>(i);
        std::sort(perm.begin(), perm.end());
        do {
            std::vector<int> chain;
            std::vector<int> face;
            for (std::size_t i = 0; i < s.size(); ++i) {
                face.push_back(s[perm[i]]);
                std::vector<int> key = face;
                std::sort(key.begin(), key.end());
                chain.push_back(face_vert(key));
            }
            std::sort(chain.begin(), chain.end());
            flag_id[{static_cast<int>(mi), perm}] = static_cast<int>(out.maximal.size());
            out.maximal.push_back(chain);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }

    if (points) {
        for (auto& p : *points) {
            const auto& s = c.maximal[p.maximal_id];
            // sort barycentric descending: the flag of prefix sets contains p
            std::vector<int> ord(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) ord[i] = static_cast<int>(i);
            std::stable_sort(ord.begin(), ord.end(),
                             [&](int a, int b) { return p.bary[a] > p.bary[b]; });
            // weights on the flag vertices: mu_j = (j+1)(lambda_(j) - lambda_(j+1))
            std::vector<double> mu(s.size());
            std::vector<int> chain_vert(s.size());
            std::vector<int> face;
            for (std::size_t j = 0; j < s.size(); ++j) {
                face.push_back(s[ord[j]]);
                std::vector<int> key = face;
                std::sort(key.begin(), key.end());
                chain_vert[j] = face_vertex.at(key);
                double next = (j + 1 < s.size()) ? p.bary[ord[j + 1]] : 0.0;
                mu[j] = (j + 1) * (p.bary[ord[j]] - next);
            }
            // locate the flag's maximal id: ord is the permutation
            int new_max = flag_id.at({p.maximal_id, ord});
            // reorder mu to the ascending-vertex order of the new simplex
            const auto& ns = out.maximal[new_max];
            std::vector<double> nb(ns.size(), 0.0);
            for (std::size_t j = 0; j < ns.size(); ++j) {
                auto it = std::find(ns.begin(), ns.end(), chain_vert[j]);
                nb[it - ns.begin()] += mu[j];
            }
            p.maximal_id = new_max;
            p.bary = nb;
        }
    }
    return out;
}

Complex product_complex(const Complex& a, const Complex& b, int max_dim) {
    Complex out;
    int na = a.vertex_count();
    auto pair_id = [&](int ia, int jb) { return jb * na + ia; };
    for (int jb = 0; jb < b.vertex_count(); ++jb)
        for (int ia = 0; ia < na; ++ia) {
            std::vector<double> v = a.verts[ia];
            v.insert(v.end(), b.verts[jb].begin(), b.verts[jb].end());
            out.verts.push_back(v);
        }
    for (const auto& sa : a.maximal)
        for (const auto& sb : b.maximal) {
            int da = static_cast<int>(sa.size()) - 1;
            int db = static_cast<int>(sb.size()) - 1;
            require(da + db <= max_dim, "product dimension above the desk-scale cap");
            // monotone staircase paths from (0,0) to (da,db)
            std::vector<std::pair<int, int>> path = {{0, 0}};
            std::function<void()> emit = [&]() {
                std::vector<int> simplex;
                for (const auto& [i, j] : path) simplex.push_back(pair_id(sa[i], sb[j]));
                std::sort(simplex.begin(), simplex.end());
                out.maximal.push_back(simplex);
            };
            std::function<void(int, int)> walk = [&](int i, int j) {
                if (i == da && j == db) {
                    emit();
                    return;
                }
                if (i < da) {
                    path.emplace_back(i + 1, j);
                    walk(i + 1, j);
                    path.pop_back();
                }
                if (j < db) {
                    path.emplace_back(i, j + 1);
                    walk(i, j + 1);
                    path.pop_back();
                }
            };
            walk(0, 0);
        }
    return out;
}

Complex product_complex(const std::vector<Complex>& factors, int max_dim) {
    require(!factors.empty(), "empty factor list");
    Complex acc = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i)
        acc = product_complex(acc, factors[i], max_dim);
    return acc;
}

Complex cone_complex(const Complex& base) {
    Complex out = base;
    int apex = out.vertex_count();
    out.verts.push_back({});
    for (auto& s : out.maximal) s.push_back(apex);  // apex id is largest: stays sorted
    return out;
}

SimplexPoint cone_point(const Complex&, double t, const SimplexPoint& base_pt) {
    require(t >= 0.0 && t <= 1.0, "cone scale out of range");
    SimplexPoint p;
    p.maximal_id = base_pt.maximal_id;
    p.bary = base_pt.bary;
    for (auto& w : p.bary) w *= t;
    p.bary.push_back(1.0 - t);  // apex weight, appended as the last vertex
    return p;
}

ApproxResult approximate(const Complex& domain, std::vector<ApproxSample> samples, double delta,
                         std::function<double(int, int)> source_dist, double eps,
                         int max_rounds) {
    require(delta > 0, "tolerance must be positive");
    if (source_dist) {
        for (std::size_t i = 0; i < samples.size(); ++i)
            for (std::size_t j = i + 1; j < samples.size(); ++j) {
                if (source_dist(samples[i].x_id, samples[j].x_id) >= eps) continue;
                double d = 0.0;
                for (std::size_t c = 0; c < samples[i].value.size(); ++c)
                    d = std::max(d, std::fabs(samples[i].value[c] - samples[j].value[c]));
                require(d < delta, "modulus precondition violated on the sample");
            }
    }

    ApproxResult res;
    res.complex = domain;
    res.relocated.clear();
    for (const auto& s : samples) res.relocated.push_back(s.at);

    auto star_diam_ok = [&]() {
        // for every vertex: samples whose carrier includes it with positive weight
        std::vector<std::vector<int>> star(res.complex.vertex_count());
        for (std::size_t si = 0; si < res.relocated.size(); ++si) {
            const auto& p = res.relocated[si];
            const auto& s = res.complex.maximal[p.maximal_id];
            for (std::size_t i = 0; i < s.size(); ++i)
                if (p.bary[i] > 1e-12) star[s[i]].push_back(static_cast<int>(si));
        }
        for (const auto& members : star) {
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b) {
                    double d = 0.0;
                    const auto& va = samples[members[a]].value;
                    const auto& vb = samples[members[b]].value;
                    for (std::size_t c = 0; c < va.size(); ++c)
                        d = std::max(d, std::fabs(va[c] - vb[c]));
                    if (d >= delta) return false;
                }
        }
        return true;
    };

    while (!star_diam_ok()) {
        require(res.rounds < max_rounds, "subdivision cap reached");
        res.complex = barycentric_subdivide(res.complex, &res.relocated);
        ++res.rounds;
    }

    // vertex values: any star sample's value (first in sample order), else zero
    std::size_t value_dim = samples.empty() ? 0 : samples[0].value.size();
    res.vertex_values.assign(res.complex.vertex_count(), std::vector<double>(value_dim, 0.0));
    std::vector<bool> have(res.complex.vertex_count(), false);
    for (std::size_t si = 0; si < res.relocated.size(); ++si) {
        const auto& p = res.relocated[si];
        const auto& s = res.complex.maximal[p.maximal_id];
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (p.bary[i] > 1e-12 && !have[s[i]]) {
                have[s[i]] = true;
                res.vertex_values[s[i]] = samples[si].value;
            }
        }
    }

    res.achieved = 0.0;
    for (std::size_t si = 0; si < samples.size(); ++si) {
        auto g = vertex_map_eval(res.complex, res.vertex_values, res.relocated[si]);
        for (std::size_t c = 0; c < g.size(); ++c)
            res.achieved = std::max(res.achieved, std::fabs(g[c] - samples[si].value[c]));
    }
    require(res.achieved < delta, "approximation guarantee failed on the sample");
    return res;
}

double jitter_component(std::uint64_t seed, std::uint64_t vertex_key, int coord, double eta) {
    std::uint64_t h = hash_combine(hash_combine(seed, vertex_key),
                                   static_cast<std::uint64_t>(coord) + 0x51ed270b);
    return eta * (2.0 * hash_uniform(h) - 1.0);
}

namespace {

// projected-gradient minimization of |A x - B y|^2 with x in the simplex and
// y either in the simplex (pair distance) or the nonnegative orthant (cone)
double pg_min_distance(const std::vector<std::vector<double>>& acols,
                       const std::vector<std::vector<double>>& bcols, bool y_simplex) {
    std::size_t dim = acols[0].size();
    std::size_t na = acols.size(), nb = bcols.size();
    auto project_simplex = [](std::vector<double>& v) {
        // Euclidean projection onto the probability simplex
        std::vector<double> u = v;
        std::sort(u.begin(), u.end(), std::greater<double>());
        double css = 0.0, theta = 0.0;
        int rho = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            css += u[i];
            double t = (css - 1.0) / (i + 1.0);
            if (u[i] - t > 0) {
                rho = static_cast<int>(i) + 1;
                theta = t;
            }
        }
        (void)rho;
        for (auto& x : v) x = std::max(0.0, x - theta);
    };
    std::vector<double> x(na, 1.0 / na), y(nb, y_simplex ? 1.0 / nb : 0.5);
    auto residual = [&](std::vector<double>& r) {
        r.assign(dim, 0.0);
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t d = 0; d < dim; ++d) r[d] += x[i] * acols[i][d];
        for (std::size_t j = 0; j < nb; ++j)
            for (std::size_t d = 0; d < dim; ++d) r[d] -= y[j] * bcols[j][d];
    };
    // Lipschitz estimate for the gradient step
    double fr = 0.0;
    for (const auto& c : acols)
        for (double v : c) fr += v * v;
    for (const auto& c : bcols)
        for (double v : c) fr += v * v;
    double step = 1.0 / (2.0 * std::max(fr, 1e-12));
    std::vector<double> r;
    for (int it = 0; it < 4000; ++it) {
        residual(r);
        std::vector<double> gx(na, 0.0), gy(nb, 0.0);
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t d = 0; d < dim; ++d) gx[i] += 2.0 * r[d] * acols[i][d];
        for (std::size_t j = 0; j < nb; ++j)
            for (std::size_t d = 0; d < dim; ++d) gy[j] -= 2.0 * r[d] * bcols[j][d];
        for (std::size_t i = 0; i < na; ++i) x[i] -= step * gx[i];
        for (std::size_t j = 0; j < nb; ++j) y[j] -= step * gy[j];
        project_simplex(x);
        if (y_simplex)
            project_simplex(y);
        else
            for (auto& v : y) v = std::max(0.0, v);
    }
    residual(r);
    double s = 0.0;
    for (double v : r) s += v * v;
    return std::sqrt(s);
}

}  // namespace

EmbeddingCertificate verify_injective(const Complex& c,
                                      const std::vector<std::vector<double>>& images,
                                      double margin) {
    EmbeddingCertificate cert;
    // (a) affine independence per maximal simplex
    for (const auto& s : c.maximal) {
        if (s.size() < 2) continue;
        std::size_t dim = images[s[0]].size();
        Eigen::MatrixXd m(dim, s.size() - 1);
        for (std::size_t i = 1; i < s.size(); ++i)
            for (std::size_t d = 0; d < dim; ++d)
                m(d, i - 1) = images[s[i]][d] - images[s[0]][d];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        double sv = svd.singularValues()(svd.singularValues().size() - 1);
        cert.min_affine_sv = std::min(cert.min_affine_sv, sv);
        if (sv <= margin) {
            cert.ok = false;
            cert.failure = "affinely dependent simplex image";
            return cert;
        }
    }
    // pairs of maximal simplices
    for (std::size_t i = 0; i < c.maximal.size(); ++i) {
        for (std::size_t j = i + 1; j < c.maximal.size(); ++j) {
            const auto& s1 = c.maximal[i];
            const auto& s2 = c.maximal[j];
            std::vector<int> shared;
            std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(),
                                  std::back_inserter(shared));
            if (shared.empty()) {
                // (b) distance between disjoint simplex images
                std::vector<std::vector<double>> a, b;
                for (int v : s1) a.push_back(images[v]);
                for (int v : s2) b.push_back(images[v]);
                double d = pg_min_distance(a, b, true);
                cert.min_pair_dist = std::min(cert.min_pair_dist, d);
                if (d <= margin) {
                    cert.ok = false;
                    cert.failure = "disjoint simplices with touching images";
                    return cert;
                }
            } else {
                // (c) cone separation at a shared vertex
                std::vector<int> only1, only2;
                std::set_difference(s1.begin(), s1.end(), shared.begin(), shared.end(),
                                    std::back_inserter(only1));
                std::set_difference(s2.begin(), s2.end(), shared.begin(), shared.end(),
                                    std::back_inserter(only2));
                if (only1.empty() || only2.empty()) continue;  // face pair
                int v = shared[0];
                std::vector<std::vector<double>> a, b;
                std::size_t dim = images[v].size();
                for (int w : only1) {
                    std::vector<double> dvec(dim);
                    for (std::size_t d = 0; d < dim; ++d) dvec[d] = images[w][d] - images[v][d];
                    a.push_back(dvec);
                }
                for (int w : only2) {
                    std::vector<double> dvec(dim);
                    for (std::size_t d = 0; d < dim; ++d) dvec[d] = images[w][d] - images[v][d];
                    b.push_back(dvec);
                }
                double d = pg_min_distance(a, b, false);
                cert.min_cone_gap = std::min(cert.min_cone_gap, d);
                if (d <= margin) {
                    cert.ok = false;
                    cert.failure = "shared-face cones not separated";
                    return cert;
                }
            }
        }
    }
    return cert;
}

PerturbResult generic_perturb_verify(const std::vector<PerturbInstance>& instances, double eta,
                                     std::uint64_t seed, int max_attempts, double margin) {
    PerturbResult out;
    for (const auto& inst : instances) {
        int d = inst.complex.dim();
        require(2 * d < static_cast<int>(inst.coords.size()),
                "dimension precondition 2 dim < |coords| violated");
    }
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
        bool all_ok = true;
        EmbeddingCertificate worst;
        for (const auto& inst : instances) {
            std::vector<std::vector<double>> restricted(inst.complex.vertex_count());
            for (int v = 0; v < inst.complex.vertex_count(); ++v) {
                for (int cidx : inst.coords) {
                    double val = inst.base_images[v][cidx] +
                                 jitter_component(s, inst.vertex_keys[v], cidx, eta);
                    restricted[v].push_back(val);
                }
            }
            auto cert = verify_injective(inst.complex, restricted, margin);
            worst.min_affine_sv = std::min(worst.min_affine_sv, cert.min_affine_sv);
            worst.min_pair_dist = std::min(worst.min_pair_dist, cert.min_pair_dist);
            worst.min_cone_gap = std::min(worst.min_cone_gap, cert.min_cone_gap);
            if (!cert.ok) {
                all_ok = false;
                worst.failure = cert.failure;
                break;
            }
        }
        ++out.attempts;
        if (all_ok) {
            out.ok = true;
            out.seed_used = s;
            out.worst = worst;
            return out;
        }
        out.worst = worst;
        out.failure = worst.failure;
    }
    return out;
}

double kuhn_product_eval(
    const std::vector<FactorPoint>& factors,
    const std::function<double(const std::vector<int>& choice)>& vertex_value) {
    return kuhn_product_eval_jittered(factors, vertex_value, 0, 0, 0.0);
}

double kuhn_product_eval_jittered(
    const std::vector<FactorPoint>& factors,
    const std::function<double(const std::vector<int>& choice)>& vertex_value,
    std::uint64_t seed, int coord, double eta) {
    struct Event {
        double tail;
        std::size_t factor;
        int level;
    };
    std::vector<Event> events;
    std::vector<int> choice(factors.size(), 0);
    for (std::size_t f = 0; f < factors.size(); ++f) {
        const auto& fp = factors[f];
        require(fp.verts.size() == fp.bary.size(), "factor carrier mismatch");
        double tail = 0.0;
        std::vector<double> tails(fp.bary.size(), 0.0);
        for (std::size_t j = fp.bary.size(); j-- > 1;) {
            tail += fp.bary[j];
            tails[j] = tail;
        }
        for (std::size_t j = 1; j < fp.bary.size(); ++j)
            events.push_back({tails[j], f, static_cast<int>(j)});
    }
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.tail != b.tail) return a.tail > b.tail;
        if (a.factor != b.factor) return a.factor < b.factor;
        return a.level < b.level;
    });
    // the product-vertex jitter key folds factor keys by XOR of their hashes,
    // so advancing one factor along the chain is an O(1) key update
    std::uint64_t key = 0;
    for (std::size_t f = 0; f < factors.size(); ++f)
        key ^= hash_mix(factors[f].keys[choice[f]]);
    auto vertex_eval = [&]() {
        double v = vertex_value(choice);
        if (eta != 0.0) v += jitter_component(seed, key, coord, eta);
        return v;
    };
    double prev = 1.0, acc = 0.0;
    for (const auto& e : events) {
        double w = prev - e.tail;
        if (w > 0) acc += w * vertex_eval();
        key ^= hash_mix(factors[e.factor].keys[choice[e.factor]]);
        choice[e.factor] = e.level;
        key ^= hash_mix(factors[e.factor].keys[choice[e.factor]]);
        prev = e.tail;
    }
    if (prev > 0) acc += prev * vertex_eval();
    return acc;
}

}  // namespace sigemb
