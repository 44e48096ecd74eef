/* Buffers reached through struct fields. */

typedef struct ring {
    int head;
    int size;
    long *cells;
} ring_t;

long ring_drain(ring_t *rg)
{
    long total;
    total = 0;
    while (rg->head < rg->size) {
        total = total + rg->cells[rg->head];
        rg->cells[rg->head] = 0;
        rg->head = rg->head + 1;
    }
    return total;
}

long ring_drain_late(ring_t *rg)
{
    long total;
    total = 0;
    while (rg->head < rg->size) {
        total = total + rg->cells[rg->head + 1];
        rg->cells[rg->head + 1] = 0;
        rg->head = rg->head + 1;
    }
    return total;
}
