/* Loops that touch several buffers at once. */

void scale_copy(int *dst, int *src, int n, int k)
{
    int i;
    for (i = 0; i < n; i++) {
        dst[i] = src[i] * k;
    }
}

int fill_and_sum(int *out, int *acc, int len, int v)
{
    int i;
    int total;
    total = 0;
    for (i = 0; i < len; i++) {
        out[i] = v;
        total = total + acc[i];
    }
    return total;
}

void clear_and_max(int *flags, int *vals, int count, int *best)
{
    int k;
    int m;
    m = 0;
    for (k = 0; k < count; k++) {
        flags[k] = m;
        m = m + vals[k];
    }
    best[0] = m;
}

void mix_channels(short *left, short *right, short *mono, int frames)
{
    int t;
    for (t = 0; t < frames; t++) {
        mono[t] = (left[t] + right[t]) / 2;
    }
}
