/* Cursor walks and guarded stores. */

int tokens_skip(char *cur, int budget)
{
    int seen;
    seen = 0;
    while (budget > 0) {
        if (*cur == ' ')
            seen++;
        cur++;
        budget--;
    }
    return seen;
}

int tokens_peek(char *cur, int budget)
{
    int seen;
    seen = 0;
    while (budget > 0) {
        cur = cur + 1;
        if (*cur == ' ')
            seen++;
        budget--;
    }
    return seen;
}

void put_checked(double *slot, int idx, int cap, double v)
{
    if (idx >= 0 && idx < cap)
        slot[idx] = v;
    if (idx >= 0 && idx < cap)
        slot[idx] = slot[idx] * 0.5;
}

void put_loose(double *slot, int idx, int cap, double v)
{
    if (idx >= 0 && idx < cap + 1)
        slot[idx] = v;
    if (idx >= 0 && idx < cap + 1)
        slot[idx] = slot[idx] * 0.5;
}
