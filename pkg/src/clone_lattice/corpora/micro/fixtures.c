/* Pointer loops with hand-checked verdicts: one true clone pair, two look-alike pairs. */

typedef struct { double r; double i; } complex;

int32 mgau_eval(mgau_model_t *g, int32 m, float32 *x, int32 *active)
{
    int32 j, c;
    float64 score;
    score = g->distfloor;
    for (j = 0; active[j] >= 0; j++) {
        c = active[j];
        score = score + x[c];
    }
    return score;
}

void lextree_hmm_histbin(lextree_t *lextree, int32 bestscr, int32 *bin, int32 *list)
{
    int32 i, k, ln;
    for (i = 0; i < lextree->n_active; i++) {
        ln = list[i];
        k = (bestscr - ln) >> 4;
        bin[k] += 1;
    }
}

void fe_spec_loop1(complex *IN, double *data, int32 data_len)
{
    int32 wrap, j;
    j = 0;
    for (wrap = 0; j < data_len; wrap++, j++) {
        IN[wrap].r += data[j];
        IN[wrap].i += 0.0;
    }
}

void fe_spec_loop2(complex *IN, double *data, int32 fftsize)
{
    int32 j;
    for (j = 0; j < fftsize; j++) {
        IN[j].r = data[j];
        IN[j].i = 0.0;
    }
}

void dict2pid_dump(FILE *fp, mdef_t *mdef, dict2pid_t *d2p)
{
    int32 i, j, w;
    fprintf(fp, "# %d\n", d2p->n_ci);
    for (w = 0; w < d2p->n_ci; w++)
        fprintf(fp, "%d ", d2p->ci[w]);
    for (i = 0; i < mdef->n_sseq; i++) {
        fprintf(fp, "%5d:", mdef->sseq[i][0]);
        for (j = 0; j < mdef->n_emit_state; j++)
            fprintf(fp, " %5d", mdef->sseq[i][j]);
        fprintf(fp, "\n");
    }
}

float64 gc_compute_closest_cw(gs_t *gs, float32 *feat, FILE *fp)
{
    int32 codeid, cid, k;
    float64 diff, dist;
    for (codeid = 0; codeid < gs->n_code; codeid += 2) {
        fprintf(fp, "%d:", gs->codeword[codeid][0]);
        for (cid = 0; cid < gs->n_featlen; cid++)
            fprintf(fp, " %f", gs->codeword[codeid][cid]);
    }
    dist = 0;
    for (k = 0; k < gs->n_featlen; k++) {
        diff = feat[k] - gs->mean[k];
        dist = dist + diff * diff;
    }
    return dist;
}
