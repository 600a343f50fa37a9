/* Compiles the public header as C and drives a tiny session through it. */
#include <heptapile/heptapile.h>

#include <stdio.h>

int main(void) {
    hp_ball* ball = NULL;
    hp_state* phi = NULL;
    hp_state* out = NULL;
    hp_relax_stats stats;
    uint64_t origin = 0;
    int64_t mass = 0;

    if (hp_ball_build(1, &ball) != HP_OK) return 1;
    if (hp_state_max_stable(ball, &phi) != HP_OK) return 1;
    if (hp_state_perturb(phi, &origin, 1) != HP_OK) return 1;
    if (hp_relax(phi, HP_RELAX_FIFO, &out, NULL, &stats) != HP_OK) return 1;
    if (hp_state_mass(out, &mass) != HP_OK) return 1;
    printf("mass %lld topplings %llu\n", (long long)mass, (unsigned long long)stats.topplings);

    hp_state_free(out);
    hp_state_free(phi);
    hp_ball_free(ball);
    return mass == 21 && stats.topplings == 9 ? 0 : 1;
}
